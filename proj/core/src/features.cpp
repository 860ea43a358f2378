/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/features.cpp
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
#include "fa3d/features.hpp"

#include <cmath>
#include <limits>

namespace fa3d {

Eigen::VectorXd hog_descriptor(const Image& img, const Landmarks2D& u, const BoundingBox& bbox, const HogConfig& cfg)
{
    if (!bbox.valid())
        throw validation_error("hog_descriptor: degenerate bounding box");
    if (cfg.block_dim() != 32)
        throw validation_error("hog_descriptor: cells^2 * orientation_bins must equal 32");

    const int n = static_cast<int>(u.cols());
    const int patch = std::max(cfg.min_patch_px, static_cast<int>(std::lround(cfg.patch_scale * bbox.side())));
    const double half = 0.5 * (patch - 1);
    const double cell_size = static_cast<double>(patch) / cfg.cells;

    Eigen::VectorXd out = Eigen::VectorXd::Zero(32 * n);
    for (int lm = 0; lm < n; ++lm)
    {
        Eigen::VectorXd block = Eigen::VectorXd::Zero(32);
        const double cx = u(0, lm);
        const double cy = u(1, lm);
        for (int py = 0; py < patch; ++py)
        {
            for (int px = 0; px < patch; ++px)
            {
                const double x = cx + px - half;
                const double y = cy + py - half;
                // Central differences on the clamped bilinear field.
                const double gx = 0.5 * (img.sample(x + 1.0, y) - img.sample(x - 1.0, y));
                const double gy = 0.5 * (img.sample(x, y + 1.0) - img.sample(x, y - 1.0));
                const double mag = std::hypot(gx, gy);
                if (mag <= 0.0)
                    continue;
                double angle = std::atan2(gy, gx); // unsigned orientation in [0, pi)
                if (angle < 0.0)
                    angle += M_PI;
                if (angle >= M_PI)
                    angle -= M_PI;
                int bin = static_cast<int>(angle / M_PI * cfg.orientation_bins);
                bin = std::min(bin, cfg.orientation_bins - 1);
                const int cell_x = std::min(static_cast<int>(px / cell_size), cfg.cells - 1);
                const int cell_y = std::min(static_cast<int>(py / cell_size), cfg.cells - 1);
                block((cell_y * cfg.cells + cell_x) * cfg.orientation_bins + bin) += mag;
            }
        }
        const double norm = block.norm();
        block /= std::max(norm, cfg.epsilon);
        out.segment(32 * lm, 32) = block;
    }
    return out;
}

double sample_feature(const Image& img, const Landmarks2D& u, const BoundingBox& bbox, const ShapeIndexedFeature& f)
{
    const double scale = bbox.side();
    const double ax = u(0, f.anchor_landmark) + f.offset_a.x() * scale;
    const double ay = u(1, f.anchor_landmark) + f.offset_a.y() * scale;
    const double bx = u(0, f.anchor_landmark) + f.offset_b.x() * scale;
    const double by = u(1, f.anchor_landmark) + f.offset_b.y() * scale;
    return img.sample(ax, ay) - img.sample(bx, by);
}

std::vector<int> select_features(const Eigen::MatrixXd& values, const Eigen::MatrixXd& targets, int count, Rng& rng)
{
    const Eigen::Index samples = values.rows();
    const Eigen::Index candidates = values.cols();
    if (targets.rows() != samples)
        throw validation_error("select_features: value rows must align with targets");
    if (count > candidates)
        throw validation_error("select_features: more picks requested than candidates");

    const Eigen::MatrixXd centered = values.rowwise() - values.colwise().mean();
    const Eigen::VectorXd col_norms = centered.colwise().norm();
    if ((col_norms.array() <= 0.0).all())
        throw numerical_error("select_features: all candidate features have zero variance");

    std::vector<int> selected;
    std::vector<bool> used(static_cast<std::size_t>(candidates), false);
    selected.reserve(static_cast<std::size_t>(count));

    for (int pick = 0; pick < count; ++pick)
    {
        Eigen::VectorXd dir(targets.cols());
        for (Eigen::Index i = 0; i < dir.size(); ++i)
            dir(i) = rng.normal();
        const double dn = dir.norm();
        if (dn > 0.0)
            dir /= dn;

        Eigen::VectorXd y = targets * dir;
        y.array() -= y.mean();
        const double yn = y.norm();

        int best = -1;
        double best_corr = -1.0;
        for (Eigen::Index c = 0; c < candidates; ++c)
        {
            if (used[static_cast<std::size_t>(c)] || col_norms(c) <= 0.0)
                continue;
            const double corr =
                yn > 0.0 ? std::abs(centered.col(c).dot(y)) / (col_norms(c) * yn) : 0.0;
            if (corr > best_corr)
            {
                best_corr = corr;
                best = static_cast<int>(c);
            }
        }
        if (best < 0)
            throw numerical_error("select_features: ran out of usable candidates");
        used[static_cast<std::size_t>(best)] = true;
        selected.push_back(best);
    }
    return selected;
}

} // namespace fa3d
