/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/camera.cpp
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
#include "fa3d/camera.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

namespace fa3d {

bool ProjectionMatrix::is_normalized(double tol) const
{
    const Eigen::Vector3d r1 = row1();
    const Eigen::Vector3d r2 = row2();
    const double n1 = r1.norm();
    const double n2 = r2.norm();
    return n1 > 0.0 && std::abs(n1 - n2) <= tol && std::abs(r1.dot(r2)) <= tol && m.allFinite();
}

Eigen::Matrix3d rotation_from_angles(double yaw, double pitch, double roll)
{
    const double ca = std::cos(yaw), sa = std::sin(yaw);
    const double cb = std::cos(pitch), sb = std::sin(pitch);
    const double cg = std::cos(roll), sg = std::sin(roll);
    Eigen::Matrix3d ry, rx, rz;
    ry << ca, 0, sa, 0, 1, 0, -sa, 0, ca;
    rx << 1, 0, 0, 0, cb, -sb, 0, sb, cb;
    rz << cg, -sg, 0, sg, cg, 0, 0, 0, 1;
    return ry * rx * rz;
}

Landmarks2D project(const ProjectionMatrix& m, const Shape3D& shape)
{
    if (shape.rows() != 4)
        throw validation_error("project: shape must be 4xN homogeneous");
    return m.m * shape;
}

ProjectionMatrix compose(const PoseParams& pose)
{
    if (!(pose.scale > 0.0))
        throw validation_error("compose: scale must be positive");
    const Eigen::Matrix3d r = rotation_from_angles(pose.yaw, pose.pitch, pose.roll);
    ProjectionMatrix out;
    out.m.block<2, 3>(0, 0) = pose.scale * r.topRows<2>();
    out.m(0, 3) = pose.tx;
    out.m(1, 3) = pose.ty;
    return out;
}

PoseParams decompose(const ProjectionMatrix& m)
{
    const Eigen::Vector3d m1 = m.row1();
    const Eigen::Vector3d m2 = m.row2();
    const double n1 = m1.norm();
    const double n2 = m2.norm();
    if (n1 < 1e-9 || n2 < 1e-9)
        throw numerical_error("decompose: degenerate projection matrix rows");

    Eigen::Matrix3d r_est;
    r_est.row(0) = (m1 / n1).transpose();
    r_est.row(1) = (m2 / n2).transpose();
    r_est.row(2) = (m1 / n1).cross(m2 / n2).transpose();

    // Nearest rotation (orthogonal Procrustes with determinant fix).
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(r_est, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d d = Eigen::Vector3d::Ones();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
        d(2) = -1.0;
    const Eigen::Matrix3d r = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();

    PoseParams pose;
    pose.scale = 0.5 * (n1 + n2);
    pose.tx = m.m(0, 3);
    pose.ty = m.m(1, 3);

    // R = Ry(a) Rx(b) Rz(g):
    //   R(1,2) = -sin(b);  R(0,2) = sin(a)cos(b);  R(2,2) = cos(a)cos(b);
    //   R(1,0) = cos(b)sin(g);  R(1,1) = cos(b)cos(g).
    const double sb = -r(1, 2);
    pose.pitch = std::asin(std::clamp(sb, -1.0, 1.0));
    if (std::abs(std::abs(pose.pitch) - M_PI / 2.0) < 1e-6)
    {
        pose.gimbal_locked = true;
        pose.roll = 0.0;
        // With roll fixed at 0: R = Ry(a) Rx(+-pi/2); R(0,0)=cos(a), R(2,0)=-sin(a).
        pose.yaw = std::atan2(-r(2, 0), r(0, 0));
    }
    else
    {
        pose.yaw = std::atan2(r(0, 2), r(2, 2));
        pose.roll = std::atan2(r(1, 0), r(1, 1));
    }
    return pose;
}

ProjectionMatrix renormalize(const ProjectionMatrix& m)
{
    return compose(decompose(m));
}

ProjectionMatrix init_from_bbox(const ProjectionMatrix& mean_m, const DeformableModel& model, const BoundingBox& b)
{
    if (!b.valid())
        throw validation_error("init_from_bbox: invalid bounding box");
    PoseParams pose = decompose(mean_m);
    pose.tx = 0.0;
    pose.ty = 0.0;

    const Landmarks2D u0 = project(compose(pose), model.mean_shape());
    const double w0 = u0.row(0).maxCoeff() - u0.row(0).minCoeff();
    const double h0 = u0.row(1).maxCoeff() - u0.row(1).minCoeff();
    if (w0 < 1e-12 || h0 < 1e-12)
        throw numerical_error("init_from_bbox: degenerate mean-shape projection");

    double factor = b.width / w0;
    if (factor * h0 > 1.2 * b.height)
        factor = b.height / h0;
    pose.scale *= factor;

    const Landmarks2D u1 = project(compose(pose), model.mean_shape());
    pose.tx = b.center_x() - 0.5 * (u1.row(0).maxCoeff() + u1.row(0).minCoeff());
    pose.ty = b.center_y() - 0.5 * (u1.row(1).maxCoeff() + u1.row(1).minCoeff());
    return compose(pose);
}

VisibilityVector visibility(const ProjectionMatrix& m, const Eigen::Matrix3Xd& normals, VisibilityVector::Mode mode)
{
    const Eigen::Vector3d m1 = m.row1();
    const Eigen::Vector3d m2 = m.row2();
    const double n1 = m1.norm();
    const double n2 = m2.norm();
    if (n1 < 1e-9 || n2 < 1e-9)
        throw numerical_error("visibility: degenerate projection matrix rows");
    const Eigen::Vector3d axis = (m1 / n1).cross(m2 / n2);

    VisibilityVector out;
    out.v = normals.transpose() * axis;
    out.mode = mode;
    if (mode == VisibilityVector::Mode::Hard)
    {
        for (Eigen::Index i = 0; i < out.v.size(); ++i)
            out.v(i) = out.v(i) >= 0.0 ? 1.0 : 0.0; // sign(0) counts as visible
    }
    return out;
}

VisibilityVector harden(const VisibilityVector& soft)
{
    VisibilityVector out;
    out.mode = VisibilityVector::Mode::Hard;
    out.v = (soft.v.array() >= 0.0).cast<double>();
    return out;
}

} // namespace fa3d
