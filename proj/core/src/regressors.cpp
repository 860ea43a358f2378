/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/regressors.cpp
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
#include "fa3d/regressors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fa3d {

namespace {

/// Expands a per-landmark visibility vector into the 32N feature mask.
Eigen::VectorXd expand_mask(const Eigen::VectorXd& vis)
{
    Eigen::VectorXd mask(32 * vis.size());
    for (Eigen::Index lm = 0; lm < vis.size(); ++lm)
        mask.segment(32 * lm, 32).setConstant(vis(lm));
    return mask;
}

double quantile_by_index(std::vector<double> sorted, double q)
{
    const auto n = sorted.size();
    const auto idx = static_cast<std::size_t>(q * static_cast<double>(n - 1));
    return sorted[idx];
}

} // namespace

int zone_of_landmark(const Landmarks2D& u, int landmark)
{
    const double min_x = u.row(0).minCoeff();
    const double max_x = u.row(0).maxCoeff();
    const double min_y = u.row(1).minCoeff();
    const double max_y = u.row(1).maxCoeff();
    const double w = max_x - min_x;
    const double h = max_y - min_y;
    int cx = 0, cy = 0;
    if (w > 0.0)
        cx = std::clamp(static_cast<int>((u(0, landmark) - min_x) / w * 3.0), 0, 2);
    if (h > 0.0)
        cy = std::clamp(static_cast<int>((u(1, landmark) - min_y) / h * 3.0), 0, 2);
    return cy * 3 + cx;
}

LinearRegressor train_linear(const Eigen::MatrixXd& features, const Eigen::MatrixXd& vis,
                             const Eigen::MatrixXd& targets, double lambda)
{
    const Eigen::Index n = features.rows();
    const Eigen::Index dim = features.cols();
    if (n < 1 || targets.rows() != n || vis.rows() != n || vis.cols() * 32 != dim)
        throw validation_error("train_linear: inconsistent sample dimensions");

    Eigen::MatrixXd masked(n, dim);
    for (Eigen::Index i = 0; i < n; ++i)
        masked.row(i) = features.row(i).cwiseProduct(expand_mask(vis.row(i).transpose()).transpose());

    Eigen::MatrixXd normal = masked.transpose() * masked;
    normal.diagonal().array() += lambda;
    LinearRegressor out;
    out.lambda = lambda;
    out.theta = normal.ldlt().solve(masked.transpose() * targets);
    return out;
}

Eigen::VectorXd apply_linear(const LinearRegressor& r, const Eigen::VectorXd& x, const Eigen::VectorXd& vis)
{
    if (x.size() != r.theta.rows() || vis.size() * 32 != x.size())
        throw validation_error("apply_linear: dimension mismatch");
    return r.theta.transpose() * x.cwiseProduct(expand_mask(vis));
}

int Fern::bin_index(const Image& img, const Landmarks2D& u, const BoundingBox& bbox) const
{
    int idx = 0;
    for (int j = 0; j < kDepth; ++j)
        if (sample_feature(img, u, bbox, features[static_cast<std::size_t>(j)]) >=
            features[static_cast<std::size_t>(j)].threshold)
            idx |= 1 << j;
    return idx;
}

Eigen::VectorXd Fern::predict(const Image& img, const Landmarks2D& u, const BoundingBox& bbox) const
{
    return bin_outputs.col(bin_index(img, u, bbox));
}

FernLayer train_fern_layer(std::span<const FernSample> samples, const Eigen::MatrixXd& targets,
                           const FernConfig& cfg, Rng& rng)
{
    const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
    if (n < Fern::kBins)
        throw validation_error("train_fern_layer: need at least 32 samples");
    if (targets.rows() != n)
        throw validation_error("train_fern_layer: targets do not align with samples");
    const int num_landmarks = static_cast<int>(samples[0].landmarks.cols());
    const Eigen::Index dim = targets.cols();

    // Per-image zone assignment over the current landmark layout; zone
    // occlusion is 1 - mean clamped soft visibility of its member landmarks.
    std::array<double, 9> occ_sum{};
    std::array<long, 9> occ_count{};
    std::vector<std::array<int, 9>> landmark_zone_votes(static_cast<std::size_t>(num_landmarks), std::array<int, 9>{});
    for (const auto& s : samples)
    {
        for (int lm = 0; lm < num_landmarks; ++lm)
        {
            const int z = zone_of_landmark(s.landmarks, lm);
            occ_sum[static_cast<std::size_t>(z)] += std::clamp(s.soft_vis(lm), 0.0, 1.0);
            occ_count[static_cast<std::size_t>(z)] += 1;
            landmark_zone_votes[static_cast<std::size_t>(lm)][static_cast<std::size_t>(z)] += 1;
        }
    }
    std::array<double, 9> occ{};
    for (int z = 0; z < 9; ++z)
        occ[static_cast<std::size_t>(z)] =
            occ_count[static_cast<std::size_t>(z)] > 0
                ? 1.0 - occ_sum[static_cast<std::size_t>(z)] / static_cast<double>(occ_count[static_cast<std::size_t>(z)])
                : 1.0;
    if (std::all_of(occ.begin(), occ.end(), [](double o) { return o >= 1.0 - 1e-12; }))
        throw numerical_error("train_fern_layer: every zone is fully occluded");

    // The 3 least-occluded zones, ties broken by ascending index.
    std::array<int, 9> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return occ[static_cast<std::size_t>(a)] < occ[static_cast<std::size_t>(b)];
    });

    // Candidate anchors per zone: majority assignment, falling back to any
    // landmark ever assigned to the zone.
    auto zone_anchors = [&](int z) {
        std::vector<int> majority, any;
        for (int lm = 0; lm < num_landmarks; ++lm)
        {
            const auto& votes = landmark_zone_votes[static_cast<std::size_t>(lm)];
            const int best = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
            if (best == z)
                majority.push_back(lm);
            if (votes[static_cast<std::size_t>(z)] > 0)
                any.push_back(lm);
        }
        return majority.empty() ? any : majority;
    };

    FernLayer layer;
    for (int slot = 0; slot < FernLayer::kZones; ++slot)
    {
        const int z = order[static_cast<std::size_t>(slot)];
        layer.zones[static_cast<std::size_t>(slot)] = z;
        const std::vector<int> anchors = zone_anchors(z);
        if (anchors.empty())
            throw numerical_error("train_fern_layer: selected zone has no landmarks");

        // Candidate pool: anchors from this zone, offsets uniform in a disc.
        std::vector<ShapeIndexedFeature> pool(static_cast<std::size_t>(cfg.num_candidates));
        auto disc = [&]() {
            while (true)
            {
                const double x = rng.uniform(-cfg.offset_radius, cfg.offset_radius);
                const double y = rng.uniform(-cfg.offset_radius, cfg.offset_radius);
                if (x * x + y * y <= cfg.offset_radius * cfg.offset_radius)
                    return Eigen::Vector2d(x, y);
            }
        };
        for (auto& f : pool)
        {
            f.anchor_landmark = anchors[rng.uniform_index(anchors.size())];
            f.offset_a = disc();
            f.offset_b = disc();
        }

        Eigen::MatrixXd values(n, cfg.num_candidates);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int c = 0; c < cfg.num_candidates; ++c)
                values(i, c) = sample_feature(*samples[static_cast<std::size_t>(i)].image,
                                              samples[static_cast<std::size_t>(i)].landmarks,
                                              samples[static_cast<std::size_t>(i)].bbox,
                                              pool[static_cast<std::size_t>(c)]);

        const std::vector<int> picked = select_features(values, targets, Fern::kDepth, rng);

        Fern& fern = layer.ferns[static_cast<std::size_t>(slot)];
        for (int j = 0; j < Fern::kDepth; ++j)
        {
            fern.features[static_cast<std::size_t>(j)] = pool[static_cast<std::size_t>(picked[static_cast<std::size_t>(j)])];
            std::vector<double> col(static_cast<std::size_t>(n));
            for (Eigen::Index i = 0; i < n; ++i)
                col[static_cast<std::size_t>(i)] = values(i, picked[static_cast<std::size_t>(j)]);
            std::sort(col.begin(), col.end());
            const double lo = quantile_by_index(col, cfg.threshold_lo_pct);
            const double hi = quantile_by_index(col, cfg.threshold_hi_pct);
            fern.features[static_cast<std::size_t>(j)].threshold = rng.uniform(lo, hi);
        }

        // Bin outputs with shrinkage: sum(targets in bin) / (n_bin + beta).
        fern.bin_outputs = Eigen::MatrixXd::Zero(dim, Fern::kBins);
        Eigen::VectorXd bin_counts = Eigen::VectorXd::Zero(Fern::kBins);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            int idx = 0;
            for (int j = 0; j < Fern::kDepth; ++j)
                if (values(i, picked[static_cast<std::size_t>(j)]) >= fern.features[static_cast<std::size_t>(j)].threshold)
                    idx |= 1 << j;
            fern.bin_outputs.col(idx) += targets.row(i).transpose();
            bin_counts(idx) += 1.0;
        }
        for (int b = 0; b < Fern::kBins; ++b)
        {
            const double denom = bin_counts(b) + cfg.shrinkage;
            if (denom > 0.0)
                fern.bin_outputs.col(b) /= denom;
            else
                fern.bin_outputs.col(b).setZero();
        }
    }

    double weight_sum = 0.0;
    for (int slot = 0; slot < FernLayer::kZones; ++slot)
    {
        const double w = std::max(0.0, 1.0 - occ[static_cast<std::size_t>(layer.zones[static_cast<std::size_t>(slot)])]);
        layer.zone_weights[static_cast<std::size_t>(slot)] = w;
        weight_sum += w;
    }
    if (weight_sum > 0.0)
        for (auto& w : layer.zone_weights)
            w /= weight_sum;
    else
        layer.zone_weights.fill(1.0 / FernLayer::kZones);

    return layer;
}

Eigen::VectorXd apply_fern_layer(const FernLayer& layer, const Image& img, const Landmarks2D& u,
                                 const BoundingBox& bbox)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(layer.ferns[0].bin_outputs.rows());
    for (int slot = 0; slot < FernLayer::kZones; ++slot)
        out += layer.zone_weights[static_cast<std::size_t>(slot)] *
               layer.ferns[static_cast<std::size_t>(slot)].predict(img, u, bbox);
    return out;
}

} // namespace fa3d
