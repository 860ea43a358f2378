/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/eval.cpp
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
#include "fa3d/eval.hpp"

#include "fa3d/shape_model.hpp"

#include <cmath>
#include <limits>

namespace fa3d {

namespace {

void check_record(const EvalRecord& r)
{
    if (r.estimated.cols() != r.truth.cols() || r.vis.size() != r.truth.cols())
        throw validation_error("eval: record dimensions do not conform");
    if (!(r.d > 0.0))
        throw validation_error("eval: normalizer d must be positive");
    if (r.vis.sum() < 0.5)
        throw validation_error("eval: record has no visible landmarks");
}

} // namespace

double mape(std::span<const EvalRecord> records)
{
    if (records.empty())
        throw validation_error("mape: empty record set");
    double total = 0.0;
    double visible = 0.0;
    for (const auto& r : records)
    {
        check_record(r);
        for (Eigen::Index j = 0; j < r.vis.size(); ++j)
        {
            if (r.vis(j) > 0.5)
            {
                total += (r.estimated.col(j) - r.truth.col(j)).norm();
                visible += 1.0;
            }
        }
    }
    return total / visible;
}

double nme(std::span<const EvalRecord> records)
{
    if (records.empty())
        throw validation_error("nme: empty record set");
    double total = 0.0;
    for (const auto& r : records)
    {
        check_record(r);
        double err = 0.0;
        double visible = 0.0;
        for (Eigen::Index j = 0; j < r.vis.size(); ++j)
        {
            if (r.vis(j) > 0.5)
            {
                err += (r.estimated.col(j) - r.truth.col(j)).norm();
                visible += 1.0;
            }
        }
        total += err / (r.d * visible);
    }
    return 100.0 * total / static_cast<double>(records.size());
}

double mape3d(const Shape3D& estimated, const Shape3D& truth)
{
    if (estimated.cols() != truth.cols())
        throw validation_error("mape3d: shapes do not conform");
    const Eigen::Matrix3Xd est = estimated.topRows<3>();
    const Eigen::Matrix3Xd tru = truth.topRows<3>();
    const SimilarityTransform t = procrustes_similarity(tru, est);
    const Eigen::Matrix3Xd aligned = t.apply(tru);
    return (aligned - est).colwise().norm().mean();
}

Breakdown breakdown(std::span<const EvalRecord> records, std::span<const double> bin_edges)
{
    if (records.empty())
        throw validation_error("breakdown: empty record set");
    if (bin_edges.size() < 2)
        throw validation_error("breakdown: need at least two bin edges");
    const Eigen::Index n = records[0].vis.size();
    const std::size_t bins = bin_edges.size() - 1;

    Breakdown out;
    out.bin_centers.resize(bins);
    out.bin_nme.assign(bins, std::numeric_limits<double>::quiet_NaN());
    out.bin_counts.assign(bins, 0);
    std::vector<double> bin_total(bins, 0.0);

    std::vector<double> lm_total(static_cast<std::size_t>(n), 0.0);
    std::vector<int> lm_count(static_cast<std::size_t>(n), 0);

    for (std::size_t b = 0; b < bins; ++b)
        out.bin_centers[b] = 0.5 * (bin_edges[b] + bin_edges[b + 1]);

    for (const auto& r : records)
    {
        check_record(r);
        if (r.vis.size() != n)
            throw validation_error("breakdown: landmark count varies across records");

        std::size_t bin = bins;
        for (std::size_t b = 0; b < bins; ++b)
        {
            // Last bin is closed on the right.
            if (r.yaw >= bin_edges[b] && (r.yaw < bin_edges[b + 1] || (b + 1 == bins && r.yaw <= bin_edges[b + 1])))
            {
                bin = b;
                break;
            }
        }
        if (bin == bins)
            throw validation_error("breakdown: record yaw falls outside the bin edges");

        double err = 0.0;
        double visible = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
        {
            if (r.vis(j) > 0.5)
            {
                const double e = (r.estimated.col(j) - r.truth.col(j)).norm();
                err += e;
                visible += 1.0;
                lm_total[static_cast<std::size_t>(j)] += e / r.d;
                lm_count[static_cast<std::size_t>(j)] += 1;
            }
        }
        bin_total[bin] += err / (r.d * visible);
        out.bin_counts[bin] += 1;
    }

    for (std::size_t b = 0; b < bins; ++b)
        if (out.bin_counts[b] > 0)
            out.bin_nme[b] = 100.0 * bin_total[b] / out.bin_counts[b];

    out.landmark_nme.assign(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index j = 0; j < n; ++j)
        if (lm_count[static_cast<std::size_t>(j)] > 0)
            out.landmark_nme[static_cast<std::size_t>(j)] =
                100.0 * lm_total[static_cast<std::size_t>(j)] / lm_count[static_cast<std::size_t>(j)];

    return out;
}

} // namespace fa3d
