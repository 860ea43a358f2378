/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/features.hpp
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

#ifndef FA3D_FEATURES_HPP
#define FA3D_FEATURES_HPP

#include "fa3d/types.hpp"

#include <Eigen/Core>

#include <vector>

namespace fa3d {

/// Geometry of the per-landmark HOG block. cells*cells*orientation_bins
/// must equal 32 (the per-landmark feature dimension).
struct HogConfig
{
    double patch_scale = 0.2;  // patch side as a fraction of sqrt(bbox area)
    int cells = 2;             // cells per patch side
    int orientation_bins = 8;  // unsigned gradient bins over [0, pi)
    double epsilon = 1e-6;     // normalization floor
    int min_patch_px = 16;

    int block_dim() const { return cells * cells * orientation_bins; }
};

/// Pixel-difference feature anchored to a landmark, offsets in
/// bbox-normalized units (multiplied by sqrt(bbox area) at sampling time).
struct ShapeIndexedFeature
{
    int anchor_landmark = 0;
    Eigen::Vector2d offset_a = Eigen::Vector2d::Zero();
    Eigen::Vector2d offset_b = Eigen::Vector2d::Zero();
    double threshold = 0.0;
};

/// Concatenated per-landmark HOG blocks; 32*N entries for N landmarks.
Eigen::VectorXd hog_descriptor(const Image& img, const Landmarks2D& u, const BoundingBox& bbox,
                               const HogConfig& cfg = {});

/// Intensity difference I(anchor + a*scale) - I(anchor + b*scale), bilinear
/// with edge clamping; value in [-1,1].
double sample_feature(const Image& img, const Landmarks2D& u, const BoundingBox& bbox, const ShapeIndexedFeature& f);

/// Greedy correlation-based selection: each pick projects the vector-valued
/// targets onto a fresh random unit direction and takes the unselected
/// feature column with maximum |Pearson correlation| against it.
/// values is samples x candidates, targets is samples x D.
std::vector<int> select_features(const Eigen::MatrixXd& values, const Eigen::MatrixXd& targets, int count, Rng& rng);

} // namespace fa3d

#endif /* FA3D_FEATURES_HPP */
