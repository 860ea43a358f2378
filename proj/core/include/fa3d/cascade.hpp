/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/cascade.hpp
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

#ifndef FA3D_CASCADE_HPP
#define FA3D_CASCADE_HPP

#include "fa3d/camera.hpp"
#include "fa3d/gt_fit.hpp"
#include "fa3d/regressors.hpp"
#include "fa3d/shape_model.hpp"
#include "fa3d/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fa3d {

enum class RegressorKind
{
    Linear,
    Fern
};

struct TrainConfig
{
    RegressorKind kind = RegressorKind::Linear;
    int layers = 10;       // 150 is the fern default
    double lambda = 120.0; // linear ridge weight
    std::uint64_t seed = 0;
    HogConfig hog;
    FernConfig fern;
};

/// One training sample: image, annotation, and its fitted ground truth.
struct TrainSample
{
    const Image* image = nullptr;
    Annotation annotation;
    ProjectionMatrix gt_m;
    ShapeParams gt_p;
};

/// Trained cascade: K layers of paired regressors (projection update,
/// shape-coefficient update), the training-set mean projection matrix, and
/// the fingerprint of the deformable model it was trained against.
struct CascadeModel
{
    RegressorKind kind = RegressorKind::Linear;
    ProjectionMatrix mean_m;
    std::uint64_t model_hash = 0;
    HogConfig hog;

    // kind == Linear
    std::vector<LinearRegressor> linear_m; // one per layer
    std::vector<LinearRegressor> linear_p;
    // kind == Fern
    std::vector<FernLayer> fern_m;
    std::vector<FernLayer> fern_p;

    int num_layers() const
    {
        return static_cast<int>(kind == RegressorKind::Linear ? linear_m.size() : fern_m.size());
    }
};

struct LayerSnapshot
{
    ProjectionMatrix m;
    ShapeParams p;
    Eigen::VectorXd soft_vis;
};

struct AlignmentResult
{
    Landmarks2D landmarks2d;
    Shape3D shape3d;
    ProjectionMatrix m;
    ShapeParams p;
    VisibilityVector vis; // hard
    std::vector<LayerSnapshot> per_layer_trace; // K+1 snapshots when traced
};

struct TrainReport
{
    std::vector<double> mean_nme_per_layer; // training-set NME after each layer
};

/// project(m, instantiate(model, p)): the current 2D landmark estimate.
Landmarks2D current_landmarks(const ProjectionMatrix& m, const ShapeParams& p, const DeformableModel& model);

/// Trains the cascaded coupled-regressor. Writes one
/// "layer=<k> mean_nme=<x>" line per layer to log when non-null.
CascadeModel train(std::span<const TrainSample> dataset, const DeformableModel& model, const TrainConfig& cfg,
                   std::ostream* log = nullptr, TrainReport* report = nullptr);

/// Runs the trained cascade on one image from a bounding-box initialization.
AlignmentResult align(const CascadeModel& cm, const Image& img, const BoundingBox& bbox,
                      const DeformableModel& model, bool trace = false);

} // namespace fa3d

#endif /* FA3D_CASCADE_HPP */
