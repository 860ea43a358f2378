/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/eval.hpp
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

#ifndef FA3D_EVAL_HPP
#define FA3D_EVAL_HPP

#include "fa3d/types.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace fa3d {

/// One evaluated image: estimate vs ground truth with its visibility and
/// the NME normalizer d (sqrt of bounding-box area, pixels).
struct EvalRecord
{
    Landmarks2D estimated;
    Landmarks2D truth;
    Eigen::VectorXd vis; // hard, ground truth
    double d = 1.0;
    double yaw = 0.0; // estimated yaw, radians; used only by breakdown()
};

struct Breakdown
{
    std::vector<double> bin_centers;   // yaw bin centers, radians
    std::vector<double> bin_nme;       // percent; NaN for empty bins
    std::vector<int> bin_counts;
    std::vector<double> landmark_nme;  // percent per landmark; NaN if never visible
};

/// Mean average pixel error: errors pooled over all visible landmarks of
/// all images.
double mape(std::span<const EvalRecord> records);

/// Normalized mean error in percent: per-image mean visible error divided
/// by d, averaged over images.
double nme(std::span<const EvalRecord> records);

/// Mean 3D landmark distance after removing the best global similarity
/// transform of truth onto estimate.
double mape3d(const Shape3D& estimated, const Shape3D& truth);

/// Pose-binned NME (bin edges in radians, ascending, covering all yaws)
/// plus per-landmark NME pooled over images where the landmark is visible.
Breakdown breakdown(std::span<const EvalRecord> records, std::span<const double> bin_edges);

} // namespace fa3d

#endif /* FA3D_EVAL_HPP */
