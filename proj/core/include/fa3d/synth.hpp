/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/synth.hpp
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

#ifndef FA3D_SYNTH_HPP
#define FA3D_SYNTH_HPP

#include "fa3d/camera.hpp"
#include "fa3d/gt_fit.hpp"
#include "fa3d/shape_model.hpp"
#include "fa3d/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace fa3d {

struct BboxPerturb
{
    double translation_fraction = 0.05;
    double scale_fraction = 0.10;
};

struct SynthConfig
{
    int num_images = 500;
    int image_width = 128;
    int image_height = 128;
    int num_landmarks = 21; // 6..21, cut from the canonical layout
    int num_bases = 10;
    double yaw_range = M_PI / 2.0;   // uniform in +-range
    double pitch_range = M_PI / 9.0; // +-20 degrees
    double roll_range = M_PI / 12.0; // +-15 degrees
    double scale_min = 32.0;
    double scale_max = 52.0;
    std::vector<double> shape_std;    // per-basis coefficient std; filled with shape_std_default when empty
    double shape_std_default = 0.25;
    double noise_std = 0.5;           // annotation noise, pixels
    BboxPerturb bbox_perturb;
    int num_scans = 50;               // emitted scan count (rounded up to even)
    double scan_coeff_std = 3e-4;     // deformation amplitude of emitted scans
    std::uint64_t seed = 0;
};

struct SynthSample
{
    Image image;
    Annotation annotation;
    ProjectionMatrix true_m;
    ShapeParams true_p;
    VisibilityVector true_vis_soft;
};

/// Canonical face-like landmark layout on an ellipsoid with analytic
/// outward normals, smooth deformation bases orthogonal to the affine
/// tangent space, and a matching scan set (antithetic deformation pairs)
/// from which build_model can re-derive the same subspace.
std::pair<DeformableModel, std::vector<LandmarkScan>> make_base_model(const SynthConfig& cfg);

/// Samples shape and pose, renders a procedural grayscale face (oriented
/// Gabor blobs at visible landmarks over a smooth background), and returns
/// images with annotations and exact ground truth.
std::vector<SynthSample> generate(const DeformableModel& model, const SynthConfig& cfg);

BoundingBox perturb_bbox(const BoundingBox& b, const BboxPerturb& cfg, Rng& rng);

/// Index pairs (left, right) of mirror-symmetric landmarks in the layout.
std::vector<std::pair<int, int>> layout_mirror_pairs(int num_landmarks);

} // namespace fa3d

#endif /* FA3D_SYNTH_HPP */
