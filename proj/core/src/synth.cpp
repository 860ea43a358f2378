/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/synth.cpp
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
#include "fa3d/synth.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace fa3d {

namespace {

// Ellipsoid semi-axes of the canonical head: x (width), y (height, image
// convention, down positive), z (depth, toward the camera).
constexpr double kA = 0.7;
constexpr double kB = 1.0;
constexpr double kC = 0.8;

// Canonical landmark footprint (x, y); z comes from the ellipsoid.
// Order: three midline points, then mirror pairs (left, right) so a prefix
// cut keeps complete pairs together.
constexpr int kLayoutSize = 21;
constexpr double kLayout[kLayoutSize][2] = {
    {0.00, 0.00},   // nose tip (ellipsoid apex)
    {0.00, 0.92},   // chin
    {0.00, -0.55},  // forehead center
    {-0.15, -0.30}, {0.15, -0.30}, // eye inner corners
    {-0.38, -0.32}, {0.38, -0.32}, // eye outer corners
    {-0.12, -0.48}, {0.12, -0.48}, // brow inner
    {-0.36, -0.50}, {0.36, -0.50}, // brow outer
    {-0.14, 0.12},  {0.14, 0.12},  // nose wings
    {-0.24, 0.45},  {0.24, 0.45},  // mouth corners
    {-0.48, 0.10},  {0.48, 0.10},  // cheeks
    {-0.55, 0.55},  {0.55, 0.55},  // jaw
    {-0.68, -0.05}, {0.68, -0.05}, // ear points
};

Eigen::Vector3d layout_point(int j)
{
    const double x = kLayout[j][0];
    const double y = kLayout[j][1];
    const double rest = 1.0 - x * x / (kA * kA) - y * y / (kB * kB);
    const double z = kC * std::sqrt(std::max(0.0, rest));
    return {x, y, z};
}

Eigen::Vector3d layout_normal(const Eigen::Vector3d& pt)
{
    Eigen::Vector3d n(pt.x() / (kA * kA), pt.y() / (kB * kB), pt.z() / (kC * kC));
    return n.normalized();
}

/// Orthonormal basis of the affine tangent space at a centered shape:
/// three translations plus the nine linear maps e_a p_b^T. Deformation
/// bases orthogonal to this space decouple, to first order, from any
/// update of the (affine) projection matrix; in particular they are also
/// orthogonal to the similarity tangent space, so Procrustes re-alignment
/// leaves the spanned subspace intact.
Eigen::MatrixXd affine_tangent_space(const Eigen::Matrix3Xd& points)
{
    const Eigen::Index n = points.cols();
    const Eigen::Matrix3Xd centered = points.colwise() - Eigen::Vector3d(points.rowwise().mean());
    Eigen::MatrixXd t(3 * n, 12);
    t.setZero();
    for (Eigen::Index j = 0; j < n; ++j)
    {
        for (int a = 0; a < 3; ++a)
            t(3 * j + a, a) = 1.0; // translations
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                t(3 * j + a, 3 + 3 * a + b) = centered(b, j); // linear map L_{ab}
    }
    // Orthonormalize (columns are linearly independent for non-degenerate shapes).
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(t);
    return qr.householderQ() * Eigen::MatrixXd::Identity(3 * n, 12);
}

/// Landmarks whose soft visibility can drop below a safety margin anywhere
/// in the configured pose box (evaluated on a dense grid of the box).
std::vector<bool> hideable_landmarks(const Eigen::Matrix3Xd& normals, const SynthConfig& cfg)
{
    constexpr int kGrid = 15;
    constexpr double kMargin = 0.12;
    const int n = static_cast<int>(normals.cols());
    std::vector<bool> hideable(static_cast<std::size_t>(n), false);
    for (int iy = 0; iy <= kGrid; ++iy)
        for (int ip = 0; ip <= kGrid; ++ip)
            for (int ir = 0; ir <= kGrid; ++ir)
            {
                PoseParams pose;
                pose.scale = 1.0;
                pose.yaw = cfg.yaw_range * (2.0 * iy / kGrid - 1.0);
                pose.pitch = cfg.pitch_range * (2.0 * ip / kGrid - 1.0);
                pose.roll = cfg.roll_range * (2.0 * ir / kGrid - 1.0);
                const VisibilityVector vis = visibility(compose(pose), normals, VisibilityVector::Mode::Soft);
                for (int j = 0; j < n; ++j)
                    if (vis.v(j) < kMargin)
                        hideable[static_cast<std::size_t>(j)] = true;
            }
    return hideable;
}

} // namespace

std::vector<std::pair<int, int>> layout_mirror_pairs(int num_landmarks)
{
    std::vector<std::pair<int, int>> pairs;
    for (int j = 3; j + 1 < num_landmarks; j += 2)
        pairs.emplace_back(j, j + 1);
    return pairs;
}

std::pair<DeformableModel, std::vector<LandmarkScan>> make_base_model(const SynthConfig& cfg)
{
    const int n = cfg.num_landmarks;
    if (n < 6)
        throw validation_error("make_base_model: the layout template needs at least 6 landmarks");
    if (n > kLayoutSize)
        throw validation_error("make_base_model: the layout template has at most 21 landmarks");
    const int ns = cfg.num_bases;
    if (ns < 0 || ns > 3 * n - 12)
        throw validation_error("make_base_model: too many bases for the landmark count");

    Eigen::Matrix3Xd points(3, n);
    Eigen::Matrix3Xd normals(3, n);
    for (int j = 0; j < n; ++j)
    {
        points.col(j) = layout_point(j);
        normals.col(j) = layout_normal(points.col(j));
    }

    // Smooth deformation fields, projected out of the affine tangent space
    // (so alternating projection/shape estimation decouples and Procrustes
    // re-alignment leaves the subspace intact), then orthonormalized
    // against each other. When the pose box leaves enough always-visible
    // landmarks, the fields are additionally confined to those landmarks:
    // restricted sums over any reachable visible subset then equal the full
    // sums, so the decoupling survives self-occlusion and the alternating
    // ground-truth fit recovers the generating parameters exactly.
    const std::vector<bool> hideable = hideable_landmarks(normals, cfg);
    int num_stable = 0;
    for (int j = 0; j < n; ++j)
        if (!hideable[static_cast<std::size_t>(j)])
            ++num_stable;
    const bool confine = 3 * num_stable - 12 >= ns;

    Eigen::Matrix3Xd support_points(3, confine ? num_stable : n);
    std::vector<int> support; // landmark indices carrying deformation
    for (int j = 0; j < n; ++j)
        if (!confine || !hideable[static_cast<std::size_t>(j)])
        {
            support_points.col(static_cast<Eigen::Index>(support.size())) = points.col(j);
            support.push_back(j);
        }
    const Eigen::MatrixXd sub_tangent = affine_tangent_space(support_points);
    Eigen::MatrixXd tangent = Eigen::MatrixXd::Zero(3 * n, 12);
    for (std::size_t w = 0; w < support.size(); ++w)
        tangent.middleRows<3>(3 * support[w]) = sub_tangent.middleRows<3>(3 * static_cast<Eigen::Index>(w));

    Eigen::MatrixXd basis_mat(3 * n, ns);
    int produced = 0;
    for (int k = 0; produced < ns; ++k)
    {
        if (k > 8 * ns + 64)
            throw numerical_error("make_base_model: failed to produce independent deformation bases");
        const int axis = k % 3;
        const double freq = 1.0 + 0.7 * (k / 3);
        const double phase = 0.4 * k;
        const Eigen::Vector3d dir =
            Eigen::Vector3d(std::cos(0.9 * k), std::sin(1.3 * k + 0.5), std::cos(0.6 * k + 1.1)).normalized();
        Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * n);
        for (int j : support)
            v(3 * j + axis) = std::cos(freq * dir.dot(points.col(j)) + phase);

        v -= tangent * (tangent.transpose() * v);
        for (int prev = 0; prev < produced; ++prev)
            v -= basis_mat.col(prev) * (basis_mat.col(prev).dot(v));
        const double norm = v.norm();
        if (norm < 1e-6)
            continue; // nearly dependent field, try the next one
        basis_mat.col(produced) = v / norm;
        ++produced;
    }

    std::vector<Shape3D> bases;
    bases.reserve(static_cast<std::size_t>(ns));
    for (int k = 0; k < ns; ++k)
    {
        Shape3D b = Shape3D::Zero(4, n);
        b.topRows<3>() = Eigen::Map<const Eigen::Matrix3Xd>(basis_mat.col(k).data(), 3, n);
        bases.push_back(std::move(b));
    }

    Shape3D mean = Shape3D::Ones(4, n);
    mean.topRows<3>() = points;
    DeformableModel model(mean, bases, normals);

    // Scan set: antithetic deformation pairs around the mean. Tiny
    // amplitudes keep the Procrustes re-alignment of each scan at the
    // identity to high order, so PCA recovers the generative subspace.
    const int num_scans = cfg.num_scans + (cfg.num_scans % 2);
    if (num_scans < std::max(2, ns + 1))
        throw validation_error("make_base_model: too few scans for the requested basis count");
    std::vector<LandmarkScan> scans;
    scans.reserve(static_cast<std::size_t>(num_scans));
    Rng rng(cfg.seed, 0x5ca75ULL);
    for (int s = 0; s < num_scans / 2; ++s)
    {
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(3 * n);
        for (int k = 0; k < ns; ++k)
            delta += (cfg.scan_coeff_std * rng.normal()) * basis_mat.col(k);
        for (int sign : {+1, -1})
        {
            LandmarkScan scan;
            scan.points = points + sign * Eigen::Map<const Eigen::Matrix3Xd>(delta.data(), 3, n);
            scan.normals.resize(3, n);
            for (int j = 0; j < n; ++j)
                scan.normals.col(j) = layout_normal(scan.points.col(j));
            scans.push_back(std::move(scan));
        }
    }

    return {std::move(model), std::move(scans)};
}

BoundingBox perturb_bbox(const BoundingBox& b, const BboxPerturb& cfg, Rng& rng)
{
    const double dx = rng.uniform(-cfg.translation_fraction, cfg.translation_fraction) * b.width;
    const double dy = rng.uniform(-cfg.translation_fraction, cfg.translation_fraction) * b.height;
    const double factor = rng.uniform(1.0 - cfg.scale_fraction, 1.0 + cfg.scale_fraction);
    BoundingBox out;
    out.width = b.width * factor;
    out.height = b.height * factor;
    out.x = b.center_x() + dx - 0.5 * out.width;
    out.y = b.center_y() + dy - 0.5 * out.height;
    return out;
}

std::vector<SynthSample> generate(const DeformableModel& model, const SynthConfig& cfg)
{
    if (cfg.num_images < 1 || cfg.image_width < 16 || cfg.image_height < 16)
        throw validation_error("generate: invalid image count or size");
    if (!(cfg.scale_min > 0.0) || cfg.scale_max < cfg.scale_min)
        throw validation_error("generate: invalid scale range");
    const int n = model.num_landmarks();
    const int ns = model.num_bases();
    std::vector<double> shape_std = cfg.shape_std;
    if (shape_std.empty())
        shape_std.assign(static_cast<std::size_t>(ns), cfg.shape_std_default);
    if (static_cast<int>(shape_std.size()) != ns)
        throw validation_error("generate: shape_std length does not match the model");

    std::vector<SynthSample> samples;
    samples.reserve(static_cast<std::size_t>(cfg.num_images));

    for (int i = 0; i < cfg.num_images; ++i)
    {
        // Per-sample derived stream keeps generation order-independent.
        Rng rng(cfg.seed, static_cast<std::uint64_t>(i) + 1);
        SynthSample sample;

        sample.true_p.p.resize(ns);
        for (int k = 0; k < ns; ++k)
            sample.true_p.p(k) = shape_std[static_cast<std::size_t>(k)] * rng.normal();

        PoseParams pose;
        pose.yaw = rng.uniform(-cfg.yaw_range, cfg.yaw_range);
        pose.pitch = rng.uniform(-cfg.pitch_range, cfg.pitch_range);
        pose.roll = rng.uniform(-cfg.roll_range, cfg.roll_range);
        pose.scale = rng.uniform(cfg.scale_min, cfg.scale_max);

        const Shape3D shape = instantiate(model, sample.true_p);
        Landmarks2D u = project(compose(pose), shape);
        pose.tx = 0.5 * cfg.image_width - 0.5 * (u.row(0).maxCoeff() + u.row(0).minCoeff());
        pose.ty = 0.5 * cfg.image_height - 0.5 * (u.row(1).maxCoeff() + u.row(1).minCoeff());
        sample.true_m = compose(pose);
        u = project(sample.true_m, shape);

        sample.true_vis_soft = visibility(sample.true_m, model.normals(), VisibilityVector::Mode::Soft);
        const VisibilityVector hard = harden(sample.true_vis_soft);

        BoundingBox tight;
        tight.x = u.row(0).minCoeff();
        tight.y = u.row(1).minCoeff();
        tight.width = u.row(0).maxCoeff() - tight.x;
        tight.height = u.row(1).maxCoeff() - tight.y;

        sample.annotation.bbox = perturb_bbox(tight, cfg.bbox_perturb, rng);
        sample.annotation.vis = hard.v;
        sample.annotation.landmarks.resize(2, n);
        for (int j = 0; j < n; ++j)
        {
            if (hard.v(j) > 0.5)
            {
                sample.annotation.landmarks(0, j) = u(0, j) + cfg.noise_std * rng.normal();
                sample.annotation.landmarks(1, j) = u(1, j) + cfg.noise_std * rng.normal();
            }
            else
            {
                sample.annotation.landmarks.col(j).setConstant(std::numeric_limits<double>::quiet_NaN());
            }
        }

        // Render: smooth background gradient plus an oriented Gabor blob at
        // every visible landmark, with a per-landmark-identity frequency
        // and orientation so local appearance encodes which landmark it is.
        Image img(cfg.image_width, cfg.image_height);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                img(x, y) = 0.25 + 0.2 * (static_cast<double>(x) / img.width) + 0.1 * (static_cast<double>(y) / img.height);

        // Lambertian-shaded base ellipsoid under the rigid pose, lit from
        // an oblique direction so shading breaks the left-right symmetry:
        // the intensity field then encodes scale, translation and all
        // three rotation angles densely, not just at the landmarks.
        {
            const Eigen::Matrix3d rot = rotation_from_angles(pose.yaw, pose.pitch, pose.roll);
            const Eigen::Vector3d q_diag(1.0 / (kA * kA), 1.0 / (kB * kB), 1.0 / (kC * kC));
            const Eigen::Matrix3d a3 = rot * q_diag.asDiagonal() * rot.transpose();
            const Eigen::Vector3d light = Eigen::Vector3d(0.35, -0.25, 0.9).normalized();
            for (int y = 0; y < img.height; ++y)
            {
                for (int x = 0; x < img.width; ++x)
                {
                    Eigen::Vector3d pt((x - pose.tx) / pose.scale, (y - pose.ty) / pose.scale, 0.0);
                    const double a = a3(2, 2);
                    const double b = 2.0 * (a3(2, 0) * pt.x() + a3(2, 1) * pt.y());
                    const double c = a3(0, 0) * pt.x() * pt.x() + 2.0 * a3(0, 1) * pt.x() * pt.y() +
                                     a3(1, 1) * pt.y() * pt.y() - 1.0;
                    const double disc = b * b - 4.0 * a * c;
                    if (disc < 0.0)
                        continue; // ray misses the ellipsoid
                    pt.z() = (-b + std::sqrt(disc)) / (2.0 * a); // front intersection
                    const Eigen::Vector3d normal = (a3 * pt).normalized();
                    const double shade = std::clamp(normal.dot(light), 0.0, 1.0);
                    img(x, y) = 0.2 * img(x, y) + 0.8 * (0.15 + 0.65 * shade);
                }
            }
        }

        const double sigma = 0.075 * tight.side();
        const double support = 3.0 * sigma;
        for (int j = 0; j < n; ++j)
        {
            const double amp = 0.5 * std::clamp(sample.true_vis_soft.v(j), 0.0, 1.0);
            if (amp <= 0.0)
                continue;
            const double theta = M_PI * j / n;
            // Keep the carrier period well above typical alignment error so
            // pixel differences vary smoothly with the landmark estimate.
            const double wavelength = sigma * (2.8 + 0.5 * (j % 7));
            const double omega = 2.0 * M_PI / wavelength;
            const int x_lo = std::max(0, static_cast<int>(std::floor(u(0, j) - support)));
            const int x_hi = std::min(img.width - 1, static_cast<int>(std::ceil(u(0, j) + support)));
            const int y_lo = std::max(0, static_cast<int>(std::floor(u(1, j) - support)));
            const int y_hi = std::min(img.height - 1, static_cast<int>(std::ceil(u(1, j) + support)));
            for (int y = y_lo; y <= y_hi; ++y)
            {
                for (int x = x_lo; x <= x_hi; ++x)
                {
                    const double dx = x - u(0, j);
                    const double dy = y - u(1, j);
                    const double r2 = dx * dx + dy * dy;
                    if (r2 > support * support)
                        continue;
                    const double carrier = std::cos(omega * (std::cos(theta) * dx + std::sin(theta) * dy));
                    img(x, y) += amp * std::exp(-r2 / (2.0 * sigma * sigma)) * carrier;
                }
            }
        }
        for (auto& px : img.pixels)
            px = std::clamp(px, 0.0, 1.0);

        sample.image = std::move(img);
        samples.push_back(std::move(sample));
    }
    return samples;
}

} // namespace fa3d
