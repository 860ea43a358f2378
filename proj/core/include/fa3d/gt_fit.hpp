/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/gt_fit.hpp
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

#ifndef FA3D_GT_FIT_HPP
#define FA3D_GT_FIT_HPP

#include "fa3d/camera.hpp"
#include "fa3d/shape_model.hpp"
#include "fa3d/types.hpp"

#include <vector>

namespace fa3d {

/// Labeled 2D landmarks with binary visibility and a face bounding box.
/// Coordinates of invisible landmarks are placeholders and never read.
struct Annotation
{
    Landmarks2D landmarks;
    Eigen::VectorXd vis; // entries in {0,1}
    BoundingBox bbox;

    int num_visible() const { return static_cast<int>(vis.sum() + 0.5); }
};

/// Output of the alternating ground-truth fit.
struct FitResult
{
    ProjectionMatrix m;
    ShapeParams p;
    double residual = 0.0; // final objective value, squared pixels
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; // one value per half-step
};

/// J(M,p): squared pixel error over visible landmarks.
double objective(const ProjectionMatrix& m, const ShapeParams& p, const Annotation& ann, const DeformableModel& model);

/// Closed-form minimizer of J in M for a fixed 3D shape. Raw least squares;
/// the output is not renormalized.
ProjectionMatrix solve_m(const Annotation& ann, const Shape3D& shape);

/// Closed-form minimizer of J in p for a fixed M, with a ridge fallback for
/// ill-conditioned normal matrices.
ShapeParams solve_p(const Annotation& ann, const ProjectionMatrix& m, const DeformableModel& model);

/// Alternating exact minimization of J starting from p = 0; the fitted M is
/// renormalized once after convergence.
FitResult fit(const Annotation& ann, const DeformableModel& model, double tol = 1e-7, int max_iters = 200);

} // namespace fa3d

#endif /* FA3D_GT_FIT_HPP */
