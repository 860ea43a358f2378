/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/shape_model.hpp
 *
 * Copyright 2026 The fa3d authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef FA3D_SHAPE_MODEL_HPP
#define FA3D_SHAPE_MODEL_HPP

#include "fa3d/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace fa3d {

/// One 3D scan: N labeled 3D landmarks, with optional unit surface normals.
struct LandmarkScan
{
    Eigen::Matrix3Xd points;
    Eigen::Matrix3Xd normals; // empty (0 cols) when absent
    bool has_normals() const { return normals.cols() == points.cols() && normals.cols() > 0; }
};

/// Linear statistical model of 3D landmark shape: mean plus orthonormal
/// deformation bases, with per-landmark mean surface normals.
class DeformableModel
{
public:
    DeformableModel() = default;
    DeformableModel(Shape3D mean_shape, std::vector<Shape3D> bases, Eigen::Matrix3Xd normals);

    const Shape3D& mean_shape() const { return mean_shape_; }
    const std::vector<Shape3D>& bases() const { return bases_; }
    const Shape3D& basis(int i) const { return bases_[static_cast<std::size_t>(i)]; }
    const Eigen::Matrix3Xd& normals() const { return normals_; }

    int num_landmarks() const { return static_cast<int>(mean_shape_.cols()); }
    int num_bases() const { return static_cast<int>(bases_.size()); }

    /// Content fingerprint used to pair a trained cascade with its model.
    std::uint64_t content_hash() const;

private:
    Shape3D mean_shape_;             // 4xN, last row all ones
    std::vector<Shape3D> bases_;     // each 4xN, last row all zeros
    Eigen::Matrix3Xd normals_;       // 3xN, unit columns
};

/// Shape coefficients p of a model instance.
struct ShapeParams
{
    Eigen::VectorXd p;

    static ShapeParams zero(int num_bases) { return ShapeParams{Eigen::VectorXd::Zero(num_bases)}; }
};

/// Result of similarity (scale+rotation+translation) Procrustes of a point
/// set onto a reference: x -> scale * rotation * x + translation.
struct SimilarityTransform
{
    double scale = 1.0;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Matrix3Xd apply(const Eigen::Matrix3Xd& x) const
    {
        return (scale * (rotation * x)).colwise() + translation;
    }
};

/// Closed-form similarity alignment of source onto target (least squares).
SimilarityTransform procrustes_similarity(const Eigen::Matrix3Xd& source, const Eigen::Matrix3Xd& target);

/// Builds the deformable model: generalized Procrustes alignment of the
/// scans against a running mean, PCA of the aligned shapes, and averaged
/// rotated surface normals. All scans must carry normals.
DeformableModel build_model(std::span<const LandmarkScan> scans, int num_bases);

/// S = S0 + sum_i p_i * S_i.
Shape3D instantiate(const DeformableModel& model, const ShapeParams& params);

} // namespace fa3d

#endif /* FA3D_SHAPE_MODEL_HPP */
