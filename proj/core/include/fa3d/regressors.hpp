/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/regressors.hpp
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

#ifndef FA3D_REGRESSORS_HPP
#define FA3D_REGRESSORS_HPP

#include "fa3d/camera.hpp"
#include "fa3d/features.hpp"
#include "fa3d/types.hpp"

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace fa3d {

/// Visibility-masked ridge linear regressor: output = Theta^T (mask(v) .* x)
/// where the mask duplicates each visibility entry 32 times.
struct LinearRegressor
{
    Eigen::MatrixXd theta; // (32N) x D
    double lambda = 0.0;
};

/// Depth-5 random fern: 32 bins indexed by 5 thresholded pixel-difference
/// features, each bin holding a D-dim output.
struct Fern
{
    static constexpr int kDepth = 5;
    static constexpr int kBins = 1 << kDepth;

    std::array<ShapeIndexedFeature, kDepth> features;
    Eigen::MatrixXd bin_outputs; // D x 32

    int bin_index(const Image& img, const Landmarks2D& u, const BoundingBox& bbox) const;
    Eigen::VectorXd predict(const Image& img, const Landmarks2D& u, const BoundingBox& bbox) const;
};

/// One cascade layer of fern regression: one fern per selected low-occlusion
/// zone of the 3x3 face grid, combined by occlusion-derived weights.
struct FernLayer
{
    static constexpr int kZones = 3;

    std::array<int, kZones> zones{};        // zone indices in [0,9)
    std::array<Fern, kZones> ferns;
    std::array<double, kZones> zone_weights{}; // nonnegative, sum to 1
};

struct FernConfig
{
    int num_candidates = 400;      // candidate pool size per zone
    double offset_radius = 0.15;   // bbox-normalized disc radius for offsets
    double shrinkage = 5.0;        // bin output denominator is n_bin + shrinkage
    double threshold_lo_pct = 0.05;
    double threshold_hi_pct = 0.95;
};

/// Per-image state consumed by fern training and application.
struct FernSample
{
    const Image* image = nullptr;
    Landmarks2D landmarks;
    BoundingBox bbox;
    Eigen::VectorXd soft_vis;
};

LinearRegressor train_linear(const Eigen::MatrixXd& features, const Eigen::MatrixXd& vis,
                             const Eigen::MatrixXd& targets, double lambda);

Eigen::VectorXd apply_linear(const LinearRegressor& r, const Eigen::VectorXd& x, const Eigen::VectorXd& vis);

FernLayer train_fern_layer(std::span<const FernSample> samples, const Eigen::MatrixXd& targets,
                           const FernConfig& cfg, Rng& rng);

Eigen::VectorXd apply_fern_layer(const FernLayer& layer, const Image& img, const Landmarks2D& u,
                                 const BoundingBox& bbox);

/// 3x3 grid cell of a landmark within the tight bounding box of u.
int zone_of_landmark(const Landmarks2D& u, int landmark);

} // namespace fa3d

#endif /* FA3D_REGRESSORS_HPP */
