/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/camera.hpp
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

#ifndef FA3D_CAMERA_HPP
#define FA3D_CAMERA_HPP

#include "fa3d/shape_model.hpp"
#include "fa3d/types.hpp"

#include <Eigen/Core>

namespace fa3d {

/// 2x4 weak-perspective camera matrix. "Normalized" means the two leading
/// 3-vectors of the rows are orthogonal with equal positive norms.
struct ProjectionMatrix
{
    Eigen::Matrix<double, 2, 4> m = (Eigen::Matrix<double, 2, 4>() << 1, 0, 0, 0, 0, 1, 0, 0).finished();

    Eigen::Vector3d row1() const { return m.block<1, 3>(0, 0).transpose(); }
    Eigen::Vector3d row2() const { return m.block<1, 3>(1, 0).transpose(); }
    Eigen::Vector2d translation() const { return m.col(3); }

    bool is_normalized(double tol = 1e-8) const;
};

/// Six-degree-of-freedom pose behind a normalized projection matrix.
/// Convention: camera frame x right, y down (image convention), z toward
/// the viewer; intrinsic rotation order yaw (about y), pitch (about x),
/// roll (about z).
struct PoseParams
{
    double scale = 1.0;
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
    double tx = 0.0;
    double ty = 0.0;
    bool gimbal_locked = false; // pitch within 1e-6 of +-pi/2; roll forced to 0
};

/// Per-landmark visibility: soft values in [-1,1] or hard values in {0,1}.
struct VisibilityVector
{
    enum class Mode
    {
        Soft,
        Hard
    };
    Eigen::VectorXd v;
    Mode mode = Mode::Soft;
};

/// Rotation matrix R = R_yaw(alpha) * R_pitch(beta) * R_roll(gamma).
Eigen::Matrix3d rotation_from_angles(double yaw, double pitch, double roll);

/// U = M * S.
Landmarks2D project(const ProjectionMatrix& m, const Shape3D& shape);

/// Builds a normalized projection matrix from pose parameters; the fourth
/// column is exactly (tx, ty).
ProjectionMatrix compose(const PoseParams& pose);

/// Recovers pose parameters, projecting the stacked row directions to the
/// nearest rotation matrix. compose(decompose(m)) == m for normalized m.
PoseParams decompose(const ProjectionMatrix& m);

/// compose(decompose(m)); idempotent projection onto the constraint set.
ProjectionMatrix renormalize(const ProjectionMatrix& m);

/// Adapts the scale and translation of mean_m so the projected mean shape's
/// tight bounding box matches b (width fitted, centered; height fitted
/// instead when the width fit overflows the box height by more than 20%).
ProjectionMatrix init_from_bbox(const ProjectionMatrix& mean_m, const DeformableModel& model, const BoundingBox& b);

/// Surface-normal visibility: soft v = N^T (m1_hat x m2_hat); hard maps
/// through (1+sign(v))/2 with sign(0) = +1.
VisibilityVector visibility(const ProjectionMatrix& m, const Eigen::Matrix3Xd& normals, VisibilityVector::Mode mode);

/// Hardens a soft visibility vector by the same sign rule.
VisibilityVector harden(const VisibilityVector& soft);

} // namespace fa3d

#endif /* FA3D_CAMERA_HPP */
