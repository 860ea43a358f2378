/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: tests/test_camera.cpp
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
#include "test_util.hpp"

#include <doctest.h>

using namespace fa3d;

TEST_CASE("project applies the orthographic identity")
{
    ProjectionMatrix m; // identity projection by default
    Shape3D s(4, 1);
    s << 2, 3, 4, 1;
    const Landmarks2D u = project(m, s);
    CHECK(u(0, 0) == 2.0);
    CHECK(u(1, 0) == 3.0);
}

TEST_CASE("project is linear in the matrix")
{
    Rng rng(1);
    ProjectionMatrix m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c)
            m.m(r, c) = rng.normal();
    Shape3D s = Shape3D::Random(4, 6);
    s.row(3).setOnes();

    ProjectionMatrix doubled;
    doubled.m = 2.0 * m.m;
    CHECK((project(doubled, s) - 2.0 * project(m, s)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("project matches an elementwise dot-product oracle")
{
    Rng rng(2);
    ProjectionMatrix m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c)
            m.m(r, c) = rng.normal();
    Shape3D s(4, 5);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 5; ++c)
            s(r, c) = rng.normal();

    const Landmarks2D u = project(m, s);
    for (int c = 0; c < 5; ++c)
        for (int r = 0; r < 2; ++r)
        {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += m.m(r, k) * s(k, c);
            CHECK(std::abs(u(r, c) - acc) < 1e-12);
        }
}

TEST_CASE("compose at the identity pose")
{
    PoseParams pose;
    const ProjectionMatrix m = compose(pose);
    Eigen::Matrix<double, 2, 4> expected;
    expected << 1, 0, 0, 0, 0, 1, 0, 0;
    CHECK((m.m - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("compose with scale and translation only")
{
    PoseParams pose;
    pose.scale = 2.0;
    pose.tx = 5.0;
    pose.ty = 7.0;
    const ProjectionMatrix m = compose(pose);
    Eigen::Matrix<double, 2, 4> expected;
    expected << 2, 0, 0, 5, 0, 2, 0, 7;
    CHECK((m.m - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("compose yaw-only matches an explicit rotation-matrix oracle")
{
    PoseParams pose;
    pose.scale = 1.5;
    pose.yaw = M_PI / 6.0;
    const ProjectionMatrix m = compose(pose);

    // R_y(theta) for x right, y down, z toward the viewer.
    const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
    Eigen::Matrix3d ry;
    ry << c, 0, s, 0, 1, 0, -s, 0, c;
    CHECK((m.row1() - pose.scale * ry.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((m.row2() - pose.scale * ry.row(1).transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(m.row1().dot(m.row2())) < 1e-12);
    CHECK(m.row1().norm() == doctest::Approx(pose.scale).epsilon(1e-12));
    CHECK(m.row2().norm() == doctest::Approx(pose.scale).epsilon(1e-12));
    CHECK(m.is_normalized());
}

TEST_CASE("compose rejects non-positive scale")
{
    PoseParams pose;
    pose.scale = 0.0;
    CHECK_THROWS_AS(compose(pose), validation_error);
}

TEST_CASE("decompose round-trips a known pose")
{
    PoseParams truth;
    truth.scale = 1.5;
    truth.yaw = 0.3;
    truth.pitch = -0.2;
    truth.roll = 0.1;
    truth.tx = 4.0;
    truth.ty = -2.0;
    const PoseParams got = decompose(compose(truth));
    CHECK(std::abs(got.scale - truth.scale) < 1e-8);
    CHECK(std::abs(got.yaw - truth.yaw) < 1e-8);
    CHECK(std::abs(got.pitch - truth.pitch) < 1e-8);
    CHECK(std::abs(got.roll - truth.roll) < 1e-8);
    CHECK(std::abs(got.tx - truth.tx) < 1e-8);
    CHECK(std::abs(got.ty - truth.ty) < 1e-8);
    CHECK_FALSE(got.gimbal_locked);
}

TEST_CASE("decompose of the identity projection")
{
    const PoseParams pose = decompose(ProjectionMatrix{});
    CHECK(std::abs(pose.scale - 1.0) < 1e-12);
    CHECK(std::abs(pose.yaw) < 1e-12);
    CHECK(std::abs(pose.pitch) < 1e-12);
    CHECK(std::abs(pose.roll) < 1e-12);
    CHECK(std::abs(pose.tx) < 1e-12);
    CHECK(std::abs(pose.ty) < 1e-12);
}

TEST_CASE("decompose of a perturbed matrix is a renormalization fixed point")
{
    Rng rng(3);
    PoseParams pose = test::random_pose(rng);
    ProjectionMatrix m = compose(pose);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c)
            m.m(r, c) += 1e-2 * rng.normal();

    const ProjectionMatrix fixed = renormalize(m);
    CHECK(fixed.is_normalized());
    CHECK((renormalize(fixed).m - fixed.m).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("decompose rejects degenerate rows and flags gimbal lock")
{
    SUBCASE("zero rows")
    {
        ProjectionMatrix m;
        m.m.setZero();
        CHECK_THROWS_AS(decompose(m), numerical_error);
    }
    SUBCASE("gimbal lock at pitch = pi/2")
    {
        PoseParams pose;
        pose.scale = 2.0;
        pose.yaw = 0.4;
        pose.pitch = M_PI / 2.0;
        pose.roll = 0.0;
        const ProjectionMatrix m = compose(pose);
        const PoseParams got = decompose(m);
        CHECK(got.gimbal_locked);
        CHECK(got.roll == 0.0);
        CHECK(std::abs(got.yaw - pose.yaw) < 1e-8);
        CHECK((compose(got).m - m.m).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("renormalize leaves a normalized matrix unchanged and is idempotent")
{
    Rng rng(5);
    const ProjectionMatrix m = compose(test::random_pose(rng));
    CHECK((renormalize(m).m - m.m).cwiseAbs().maxCoeff() < 1e-10);

    ProjectionMatrix perturbed = m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c)
            perturbed.m(r, c) += 0.05 * rng.normal();
    const ProjectionMatrix once = renormalize(perturbed);
    CHECK(once.is_normalized());
    CHECK((renormalize(once).m - once.m).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("init_from_bbox is a no-op for the natural box")
{
    const DeformableModel model = test::tiny_model(10, 3);
    Rng rng(7);
    PoseParams pose = test::random_pose(rng);
    pose.tx = 0.0;
    pose.ty = 0.0;
    const ProjectionMatrix m = compose(pose);

    const Landmarks2D u = project(m, model.mean_shape());
    BoundingBox b;
    b.x = u.row(0).minCoeff();
    b.y = u.row(1).minCoeff();
    b.width = u.row(0).maxCoeff() - b.x;
    b.height = u.row(1).maxCoeff() - b.y;

    const ProjectionMatrix got = init_from_bbox(m, model, b);
    CHECK((got.m - m.m).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("init_from_bbox doubles scale for a doubled box")
{
    const DeformableModel model = test::tiny_model(10, 3);
    Rng rng(9);
    const ProjectionMatrix m = compose(test::random_pose(rng));

    const Landmarks2D u = project(m, model.mean_shape());
    BoundingBox b;
    b.x = u.row(0).minCoeff();
    b.y = u.row(1).minCoeff();
    b.width = u.row(0).maxCoeff() - b.x;
    b.height = u.row(1).maxCoeff() - b.y;
    BoundingBox doubled;
    doubled.width = 2.0 * b.width;
    doubled.height = 2.0 * b.height;
    doubled.x = b.center_x() - 0.5 * doubled.width;
    doubled.y = b.center_y() - 0.5 * doubled.height;

    const PoseParams before = decompose(init_from_bbox(m, model, b));
    const PoseParams after = decompose(init_from_bbox(m, model, doubled));
    CHECK(after.scale == doctest::Approx(2.0 * before.scale).epsilon(1e-9));
    CHECK(std::abs(after.yaw - before.yaw) < 1e-10);
    CHECK(std::abs(after.pitch - before.pitch) < 1e-10);
    CHECK(std::abs(after.roll - before.roll) < 1e-10);
}

TEST_CASE("init_from_bbox fits random aspect-matched boxes to half a pixel")
{
    const DeformableModel model = test::tiny_model(12, 3);
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        const ProjectionMatrix m = compose(test::random_pose(rng));
        const Landmarks2D u0 = project(m, model.mean_shape());
        const double aspect = (u0.row(1).maxCoeff() - u0.row(1).minCoeff()) /
                              (u0.row(0).maxCoeff() - u0.row(0).minCoeff());

        BoundingBox b;
        b.width = rng.uniform(40.0, 160.0);
        b.height = aspect * b.width;
        b.x = rng.uniform(-50.0, 50.0);
        b.y = rng.uniform(-50.0, 50.0);

        const ProjectionMatrix got = init_from_bbox(m, model, b);
        const Landmarks2D u = project(got, model.mean_shape());
        CHECK(std::abs(u.row(0).minCoeff() - b.x) < 0.5);
        CHECK(std::abs(u.row(0).maxCoeff() - (b.x + b.width)) < 0.5);
        CHECK(std::abs(u.row(1).minCoeff() - b.y) < 0.5);
        CHECK(std::abs(u.row(1).maxCoeff() - (b.y + b.height)) < 0.5);
    }
}

TEST_CASE("visibility of frontal, back-facing and yaw-rotated normals")
{
    Eigen::Matrix3Xd normals(3, 2);
    normals.col(0) = Eigen::Vector3d(0, 0, 1);
    normals.col(1) = Eigen::Vector3d(0, 0, -1);

    const VisibilityVector frontal = visibility(ProjectionMatrix{}, normals, VisibilityVector::Mode::Soft);
    CHECK(frontal.v(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(frontal.v(1) == doctest::Approx(-1.0).epsilon(1e-12));
    const VisibilityVector hard = visibility(ProjectionMatrix{}, normals, VisibilityVector::Mode::Hard);
    CHECK(hard.v(0) == 1.0);
    CHECK(hard.v(1) == 0.0);

    for (double theta : {0.1, 0.8, M_PI / 2.0, -1.2})
    {
        PoseParams pose;
        pose.yaw = theta;
        const VisibilityVector soft = visibility(compose(pose), normals, VisibilityVector::Mode::Soft);
        CHECK(std::abs(soft.v(0) - std::cos(theta)) < 1e-12);
    }

    // At exactly +-pi/2 the soft value is numerically ~0; the sign rule
    // keeps the landmark visible.
    PoseParams profile;
    profile.yaw = M_PI / 2.0;
    const VisibilityVector soft = visibility(compose(profile), normals, VisibilityVector::Mode::Soft);
    CHECK(std::abs(soft.v(0)) < 1e-12);
    CHECK(harden(soft).v(0) == 1.0);
}

TEST_CASE("soft visibility lies in [-1,1] and ignores scale and translation")
{
    Rng rng(13);
    const Eigen::Matrix3Xd normals = test::unit_normals(40, rng);
    for (int trial = 0; trial < 50; ++trial)
    {
        const ProjectionMatrix m = compose(test::random_pose(rng));
        const VisibilityVector v = visibility(m, normals, VisibilityVector::Mode::Soft);
        CHECK(v.v.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);

        ProjectionMatrix scaled = m;
        scaled.m.block<2, 3>(0, 0) *= rng.uniform(0.1, 10.0);
        scaled.m.col(3) << rng.normal(), rng.normal();
        const VisibilityVector vs = visibility(scaled, normals, VisibilityVector::Mode::Soft);
        CHECK((v.v - vs.v).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("negating yaw swaps the visibility of mirrored normals")
{
    Rng rng(17);
    for (int trial = 0; trial < 25; ++trial)
    {
        Eigen::Vector3d n;
        do
        {
            n = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
        } while (n.norm() < 1e-6);
        n.normalize();
        Eigen::Matrix3Xd normals(3, 2);
        normals.col(0) = n;
        normals.col(1) = Eigen::Vector3d(-n.x(), n.y(), n.z()); // mirror across x=0

        PoseParams pose;
        pose.yaw = rng.uniform(-1.5, 1.5);
        PoseParams neg = pose;
        neg.yaw = -pose.yaw;
        const VisibilityVector a = visibility(compose(pose), normals, VisibilityVector::Mode::Soft);
        const VisibilityVector b = visibility(compose(neg), normals, VisibilityVector::Mode::Soft);
        CHECK(std::abs(a.v(0) - b.v(1)) < 1e-10);
        CHECK(std::abs(a.v(1) - b.v(0)) < 1e-10);
    }
}

TEST_CASE("project respects affine superposition of homogeneous shapes")
{
    Rng rng(19);
    ProjectionMatrix m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 4; ++c)
            m.m(r, c) = rng.normal();
    Shape3D a = Shape3D::Random(4, 7);
    Shape3D b = Shape3D::Random(4, 7);
    a.row(3).setOnes();
    b.row(3).setOnes();
    const double w = 0.3;
    const Shape3D mix = w * a + (1.0 - w) * b; // homogeneous row stays ones
    const Landmarks2D lhs = project(m, mix);
    const Landmarks2D rhs = w * project(m, a) + (1.0 - w) * project(m, b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
}
