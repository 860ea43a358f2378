/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/cascade.cpp
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
#include "fa3d/cascade.hpp"

#include <ostream>
#include <string>

namespace fa3d {

namespace {

Eigen::Matrix<double, 8, 1> flatten_m(const ProjectionMatrix& m)
{
    Eigen::Matrix<double, 8, 1> out;
    out << m.m(0, 0), m.m(0, 1), m.m(0, 2), m.m(0, 3), m.m(1, 0), m.m(1, 1), m.m(1, 2), m.m(1, 3);
    return out;
}

ProjectionMatrix unflatten_m(const Eigen::Matrix<double, 8, 1>& v)
{
    ProjectionMatrix out;
    out.m << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7);
    return out;
}

double mean_training_nme(std::span<const TrainSample> dataset, const std::vector<ProjectionMatrix>& m,
                         const std::vector<ShapeParams>& p, const DeformableModel& model)
{
    double total = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i)
    {
        const Landmarks2D u = current_landmarks(m[i], p[i], model);
        const Annotation& ann = dataset[i].annotation;
        double err = 0.0;
        int count = 0;
        for (Eigen::Index j = 0; j < ann.vis.size(); ++j)
        {
            if (ann.vis(j) > 0.5)
            {
                err += (u.col(j) - ann.landmarks.col(j)).norm();
                ++count;
            }
        }
        if (count > 0)
            total += err / (count * ann.bbox.side());
    }
    return 100.0 * total / static_cast<double>(dataset.size());
}

} // namespace

Landmarks2D current_landmarks(const ProjectionMatrix& m, const ShapeParams& p, const DeformableModel& model)
{
    return project(m, instantiate(model, p));
}

CascadeModel train(std::span<const TrainSample> dataset, const DeformableModel& model, const TrainConfig& cfg,
                   std::ostream* log, TrainReport* report)
{
    const std::size_t n = dataset.size();
    if (n < 2)
        throw validation_error("train: need at least 2 training samples");
    if (cfg.layers < 1)
        throw validation_error("train: layer count must be >= 1");
    const int num_landmarks = model.num_landmarks();
    const int ns = model.num_bases();

    CascadeModel cm;
    cm.kind = cfg.kind;
    cm.model_hash = model.content_hash();
    cm.hog = cfg.hog;

    // Mean ground-truth projection matrix, renormalized.
    Eigen::Matrix<double, 2, 4> mean_raw = Eigen::Matrix<double, 2, 4>::Zero();
    for (const auto& s : dataset)
        mean_raw += s.gt_m.m;
    mean_raw /= static_cast<double>(n);
    cm.mean_m = renormalize(ProjectionMatrix{mean_raw});

    // Per-image working state: bbox-initialized M, p = 0, v = 1.
    std::vector<ProjectionMatrix> m(n);
    std::vector<ShapeParams> p(n, ShapeParams::zero(ns));
    std::vector<Eigen::VectorXd> soft_vis(n, Eigen::VectorXd::Ones(num_landmarks));
    for (std::size_t i = 0; i < n; ++i)
        m[i] = init_from_bbox(cm.mean_m, model, dataset[i].annotation.bbox);

    Rng rng(cfg.seed);

    for (int k = 0; k < cfg.layers; ++k)
    {
        try
        {
            // First half: regress the projection-matrix update.
            std::vector<Landmarks2D> u(n);
            for (std::size_t i = 0; i < n; ++i)
                u[i] = current_landmarks(m[i], p[i], model);

            Eigen::MatrixXd targets_m(static_cast<Eigen::Index>(n), 8);
            for (std::size_t i = 0; i < n; ++i)
                targets_m.row(static_cast<Eigen::Index>(i)) = (flatten_m(dataset[i].gt_m) - flatten_m(m[i])).transpose();

            if (cfg.kind == RegressorKind::Linear)
            {
                Eigen::MatrixXd features(static_cast<Eigen::Index>(n), 32 * num_landmarks);
                Eigen::MatrixXd vis(static_cast<Eigen::Index>(n), num_landmarks);
                for (std::size_t i = 0; i < n; ++i)
                {
                    features.row(static_cast<Eigen::Index>(i)) =
                        hog_descriptor(*dataset[i].image, u[i], dataset[i].annotation.bbox, cfg.hog).transpose();
                    vis.row(static_cast<Eigen::Index>(i)) =
                        (soft_vis[i].array() >= 0.0).cast<double>().transpose();
                }
                cm.linear_m.push_back(train_linear(features, vis, targets_m, cfg.lambda));
                for (std::size_t i = 0; i < n; ++i)
                {
                    const Eigen::VectorXd delta = apply_linear(cm.linear_m.back(), features.row(static_cast<Eigen::Index>(i)).transpose(),
                                                               vis.row(static_cast<Eigen::Index>(i)).transpose());
                    m[i] = renormalize(unflatten_m(flatten_m(m[i]) + delta));
                }
            }
            else
            {
                std::vector<FernSample> fsamples(n);
                for (std::size_t i = 0; i < n; ++i)
                    fsamples[i] = FernSample{dataset[i].image, u[i], dataset[i].annotation.bbox, soft_vis[i]};
                cm.fern_m.push_back(train_fern_layer(fsamples, targets_m, cfg.fern, rng));
                for (std::size_t i = 0; i < n; ++i)
                {
                    const Eigen::VectorXd delta =
                        apply_fern_layer(cm.fern_m.back(), *dataset[i].image, u[i], dataset[i].annotation.bbox);
                    m[i] = renormalize(unflatten_m(flatten_m(m[i]) + delta));
                }
            }

            // Visibility refresh from the updated projection matrices,
            // then the second half: regress the shape-coefficient update.
            for (std::size_t i = 0; i < n; ++i)
            {
                u[i] = current_landmarks(m[i], p[i], model);
                soft_vis[i] = visibility(m[i], model.normals(), VisibilityVector::Mode::Soft).v;
            }

            Eigen::MatrixXd targets_p(static_cast<Eigen::Index>(n), ns);
            for (std::size_t i = 0; i < n; ++i)
                targets_p.row(static_cast<Eigen::Index>(i)) = (dataset[i].gt_p.p - p[i].p).transpose();

            if (cfg.kind == RegressorKind::Linear)
            {
                Eigen::MatrixXd features(static_cast<Eigen::Index>(n), 32 * num_landmarks);
                Eigen::MatrixXd vis(static_cast<Eigen::Index>(n), num_landmarks);
                for (std::size_t i = 0; i < n; ++i)
                {
                    features.row(static_cast<Eigen::Index>(i)) =
                        hog_descriptor(*dataset[i].image, u[i], dataset[i].annotation.bbox, cfg.hog).transpose();
                    vis.row(static_cast<Eigen::Index>(i)) =
                        (soft_vis[i].array() >= 0.0).cast<double>().transpose();
                }
                cm.linear_p.push_back(train_linear(features, vis, targets_p, cfg.lambda));
                for (std::size_t i = 0; i < n; ++i)
                    p[i].p += apply_linear(cm.linear_p.back(), features.row(static_cast<Eigen::Index>(i)).transpose(),
                                           vis.row(static_cast<Eigen::Index>(i)).transpose());
            }
            else
            {
                std::vector<FernSample> fsamples(n);
                for (std::size_t i = 0; i < n; ++i)
                    fsamples[i] = FernSample{dataset[i].image, u[i], dataset[i].annotation.bbox, soft_vis[i]};
                cm.fern_p.push_back(train_fern_layer(fsamples, targets_p, cfg.fern, rng));
                for (std::size_t i = 0; i < n; ++i)
                    p[i].p += apply_fern_layer(cm.fern_p.back(), *dataset[i].image, u[i], dataset[i].annotation.bbox);
            }
        }
        catch (const std::exception& e)
        {
            throw numerical_error("train: layer " + std::to_string(k + 1) + " failed: " + e.what());
        }

        const double nme = mean_training_nme(dataset, m, p, model);
        if (report)
            report->mean_nme_per_layer.push_back(nme);
        if (log)
            *log << "layer=" << (k + 1) << " mean_nme=" << nme << "\n";
    }

    return cm;
}

AlignmentResult align(const CascadeModel& cm, const Image& img, const BoundingBox& bbox,
                      const DeformableModel& model, bool trace)
{
    if (cm.model_hash != model.content_hash())
        throw validation_error("align: cascade was trained against a different deformable model");
    if (!bbox.valid())
        throw validation_error("align: invalid bounding box");

    AlignmentResult result;
    ProjectionMatrix m = init_from_bbox(cm.mean_m, model, bbox);
    ShapeParams p = ShapeParams::zero(model.num_bases());
    Eigen::VectorXd soft_vis = Eigen::VectorXd::Ones(model.num_landmarks());
    if (trace)
        result.per_layer_trace.push_back(LayerSnapshot{m, p, soft_vis});

    for (int k = 0; k < cm.num_layers(); ++k)
    {
        Landmarks2D u = current_landmarks(m, p, model);
        if (cm.kind == RegressorKind::Linear)
        {
            const Eigen::VectorXd vis_hard = (soft_vis.array() >= 0.0).cast<double>();
            const Eigen::VectorXd x = hog_descriptor(img, u, bbox, cm.hog);
            const Eigen::VectorXd delta = apply_linear(cm.linear_m[static_cast<std::size_t>(k)], x, vis_hard);
            m = renormalize(unflatten_m(flatten_m(m) + delta));
        }
        else
        {
            const Eigen::VectorXd delta = apply_fern_layer(cm.fern_m[static_cast<std::size_t>(k)], img, u, bbox);
            m = renormalize(unflatten_m(flatten_m(m) + delta));
        }

        u = current_landmarks(m, p, model);
        soft_vis = visibility(m, model.normals(), VisibilityVector::Mode::Soft).v;

        if (cm.kind == RegressorKind::Linear)
        {
            const Eigen::VectorXd vis_hard = (soft_vis.array() >= 0.0).cast<double>();
            const Eigen::VectorXd x = hog_descriptor(img, u, bbox, cm.hog);
            p.p += apply_linear(cm.linear_p[static_cast<std::size_t>(k)], x, vis_hard);
        }
        else
        {
            p.p += apply_fern_layer(cm.fern_p[static_cast<std::size_t>(k)], img, u, bbox);
        }

        if (trace)
            result.per_layer_trace.push_back(LayerSnapshot{m, p, soft_vis});
    }

    result.m = m;
    result.p = p;
    result.shape3d = instantiate(model, p);
    result.landmarks2d = project(m, result.shape3d);
    result.vis = visibility(m, model.normals(), VisibilityVector::Mode::Hard);
    return result;
}

} // namespace fa3d
