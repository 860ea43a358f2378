/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/gt_fit.cpp
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
#include "fa3d/gt_fit.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace fa3d {

namespace {

std::vector<Eigen::Index> visible_indices(const Annotation& ann)
{
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < ann.vis.size(); ++j)
        if (ann.vis(j) > 0.5)
            idx.push_back(j);
    return idx;
}

} // namespace

double objective(const ProjectionMatrix& m, const ShapeParams& p, const Annotation& ann, const DeformableModel& model)
{
    if (ann.landmarks.cols() != model.num_landmarks() || ann.vis.size() != model.num_landmarks())
        throw validation_error("objective: annotation landmark count does not match the model");
    const Landmarks2D u = project(m, instantiate(model, p));
    double j = 0.0;
    for (Eigen::Index c = 0; c < u.cols(); ++c)
        if (ann.vis(c) > 0.5)
            j += (u.col(c) - ann.landmarks.col(c)).squaredNorm();
    return j;
}

ProjectionMatrix solve_m(const Annotation& ann, const Shape3D& shape)
{
    const auto idx = visible_indices(ann);
    if (idx.size() < 4)
        throw validation_error("solve_m: need at least 4 visible landmarks");

    Eigen::MatrixXd a(static_cast<Eigen::Index>(idx.size()), 4);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(idx.size()), 2);
    for (std::size_t i = 0; i < idx.size(); ++i)
    {
        a.row(static_cast<Eigen::Index>(i)) = shape.col(idx[i]).transpose();
        b.row(static_cast<Eigen::Index>(i)) = ann.landmarks.col(idx[i]).transpose();
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4)
        throw numerical_error("solve_m: visible landmark configuration is rank deficient");

    ProjectionMatrix out;
    out.m = qr.solve(b).transpose();
    return out;
}

ShapeParams solve_p(const Annotation& ann, const ProjectionMatrix& m, const DeformableModel& model)
{
    const auto idx = visible_indices(ann);
    const int ns = model.num_bases();
    if (ns == 0)
        return ShapeParams::zero(0);

    // Stack 2 equations per visible landmark: U - M*S0 = sum_i p_i * (M*S_i).
    Eigen::MatrixXd a(2 * static_cast<Eigen::Index>(idx.size()), ns);
    Eigen::VectorXd b(2 * static_cast<Eigen::Index>(idx.size()));
    const Landmarks2D u0 = project(m, model.mean_shape());
    std::vector<Landmarks2D> projected_bases;
    projected_bases.reserve(static_cast<std::size_t>(ns));
    for (int i = 0; i < ns; ++i)
        projected_bases.push_back(m.m * model.basis(i));

    for (std::size_t r = 0; r < idx.size(); ++r)
    {
        const Eigen::Index j = idx[r];
        for (int i = 0; i < ns; ++i)
            a.block<2, 1>(2 * static_cast<Eigen::Index>(r), i) = projected_bases[static_cast<std::size_t>(i)].col(j);
        b.segment<2>(2 * static_cast<Eigen::Index>(r)) = ann.landmarks.col(j) - u0.col(j);
    }

    Eigen::MatrixXd normal = a.transpose() * a;
    const Eigen::VectorXd rhs = a.transpose() * b;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    const double ev_max = eig.eigenvalues().maxCoeff();
    const double ev_min = eig.eigenvalues().minCoeff();
    const bool ill_conditioned = !(ev_min > 0.0) || ev_max / ev_min > 1e12;
    if (ill_conditioned)
    {
        const double ridge = 1e-6 * normal.trace() / ns;
        if (!(ridge > 0.0))
            throw numerical_error("solve_p: singular normal matrix with zero-trace ridge");
        normal.diagonal().array() += ridge;
    }

    return ShapeParams{normal.ldlt().solve(rhs)};
}

FitResult fit(const Annotation& ann, const DeformableModel& model, double tol, int max_iters)
{
    if (ann.num_visible() < 6)
        throw validation_error("fit: need at least 6 visible landmarks");

    FitResult result;
    result.p = ShapeParams::zero(model.num_bases());
    ProjectionMatrix m_prev;
    Eigen::VectorXd p_prev = result.p.p;
    bool have_prev = false;

    for (int it = 1; it <= max_iters; ++it)
    {
        result.iterations = it;
        result.m = solve_m(ann, instantiate(model, result.p));
        result.objective_trace.push_back(objective(result.m, result.p, ann, model));
        result.p = solve_p(ann, result.m, model);
        result.objective_trace.push_back(objective(result.m, result.p, ann, model));

        if (have_prev)
        {
            const double dm = (result.m.m - m_prev.m).cwiseAbs().maxCoeff();
            const double dp =
                result.p.p.size() > 0 ? (result.p.p - p_prev).cwiseAbs().maxCoeff() : 0.0;
            if (dm < tol && dp < tol)
            {
                result.converged = true;
                break;
            }
        }
        m_prev = result.m;
        p_prev = result.p.p;
        have_prev = true;
    }

    // Stored ground truth obeys the weak-perspective constraint; the raw
    // minimizer is only renormalized after the loop.
    result.m = renormalize(result.m);
    result.residual = objective(result.m, result.p, ann, model);
    return result;
}

} // namespace fa3d
