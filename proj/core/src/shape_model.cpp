/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/shape_model.cpp
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
#include "fa3d/shape_model.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cstring>
#include <numeric>

namespace fa3d {

namespace {

std::uint64_t fnv1a(std::uint64_t h, const double* data, std::size_t count)
{
    const auto* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i)
    {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

Shape3D homogenize(const Eigen::Matrix3Xd& points)
{
    Shape3D s(4, points.cols());
    s.topRows<3>() = points;
    s.row(3).setOnes();
    return s;
}

} // namespace

DeformableModel::DeformableModel(Shape3D mean_shape, std::vector<Shape3D> bases, Eigen::Matrix3Xd normals)
    : mean_shape_(std::move(mean_shape)), bases_(std::move(bases)), normals_(std::move(normals))
{
    const auto n = mean_shape_.cols();
    if ((mean_shape_.row(3).array() - 1.0).abs().maxCoeff() > 1e-12)
        throw validation_error("DeformableModel: mean shape homogeneous row must be all ones");
    for (const auto& b : bases_)
    {
        if (b.cols() != n)
            throw validation_error("DeformableModel: basis landmark count mismatch");
        if (b.row(3).array().abs().maxCoeff() > 1e-12)
            throw validation_error("DeformableModel: basis homogeneous row must be all zeros");
    }
    if (normals_.cols() != n)
        throw validation_error("DeformableModel: normals landmark count mismatch");
    for (Eigen::Index j = 0; j < normals_.cols(); ++j)
    {
        if (std::abs(normals_.col(j).norm() - 1.0) > 1e-9)
            throw validation_error("DeformableModel: normals must have unit columns");
    }
}

std::uint64_t DeformableModel::content_hash() const
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const double dims[2] = {static_cast<double>(num_landmarks()), static_cast<double>(num_bases())};
    h = fnv1a(h, dims, 2);
    h = fnv1a(h, mean_shape_.data(), static_cast<std::size_t>(mean_shape_.size()));
    for (const auto& b : bases_)
        h = fnv1a(h, b.data(), static_cast<std::size_t>(b.size()));
    h = fnv1a(h, normals_.data(), static_cast<std::size_t>(normals_.size()));
    return h;
}

SimilarityTransform procrustes_similarity(const Eigen::Matrix3Xd& source, const Eigen::Matrix3Xd& target)
{
    if (source.cols() != target.cols() || source.cols() < 3)
        throw validation_error("procrustes_similarity: need conforming point sets with >= 3 points");

    const Eigen::Vector3d mu_s = source.rowwise().mean();
    const Eigen::Vector3d mu_t = target.rowwise().mean();
    const Eigen::Matrix3Xd sc = source.colwise() - mu_s;
    const Eigen::Matrix3Xd tc = target.colwise() - mu_t;

    const Eigen::Matrix3d cov = tc * sc.transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector3d d = Eigen::Vector3d::Ones();
    if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0)
        d(2) = -1.0;
    const Eigen::Matrix3d rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();

    const double denom = sc.squaredNorm();
    if (denom < 1e-300)
        throw numerical_error("procrustes_similarity: degenerate (all-coincident) source");
    const double scale = (svd.singularValues().dot(d)) / denom;

    SimilarityTransform t;
    t.rotation = rotation;
    t.scale = scale;
    t.translation = mu_t - scale * (rotation * mu_s);
    return t;
}

DeformableModel build_model(std::span<const LandmarkScan> scans, int num_bases)
{
    if (scans.size() < 2)
        throw validation_error("build_model: need at least 2 scans");
    const Eigen::Index n = scans[0].points.cols();
    for (const auto& s : scans)
    {
        if (s.points.cols() != n)
            throw validation_error("build_model: landmark count differs across scans");
        if (!s.has_normals())
            throw validation_error("build_model: scan is missing surface normals");
    }
    const int max_bases = static_cast<int>(std::min<Eigen::Index>(static_cast<Eigen::Index>(scans.size()) - 1, 3 * n));
    if (num_bases < 0 || num_bases > max_bases)
        throw validation_error("build_model: num_bases exceeds min(num_scans-1, 3N)");

    // Generalized Procrustes: align every scan to the running mean, refine.
    const std::size_t count = scans.size();
    std::vector<Eigen::Matrix3Xd> aligned(count);
    std::vector<Eigen::Matrix3d> rotations(count, Eigen::Matrix3d::Identity());
    for (std::size_t i = 0; i < count; ++i)
        aligned[i] = scans[i].points;

    Eigen::Matrix3Xd mean = scans[0].points;
    for (int pass = 0; pass < 10; ++pass)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            const SimilarityTransform t = procrustes_similarity(scans[i].points, mean);
            aligned[i] = t.apply(scans[i].points);
            rotations[i] = t.rotation;
        }
        Eigen::Matrix3Xd new_mean = Eigen::Matrix3Xd::Zero(3, n);
        for (const auto& a : aligned)
            new_mean += a;
        new_mean /= static_cast<double>(count);
        const double change = (new_mean - mean).cwiseAbs().maxCoeff();
        mean = new_mean;
        if (change < 1e-10)
            break;
    }

    // PCA on mean-centered flattened 3N-vectors.
    const Eigen::Index dim = 3 * n;
    Eigen::MatrixXd data(static_cast<Eigen::Index>(count), dim);
    for (std::size_t i = 0; i < count; ++i)
        data.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(aligned[i].data(), dim).transpose() -
            Eigen::Map<const Eigen::VectorXd>(mean.data(), dim).transpose();

    std::vector<Shape3D> bases;
    if (num_bases > 0)
    {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double rank_floor = std::max(1e-12, sv(0) * 1e-10);
        if (sv(0) <= 0.0 || sv(num_bases - 1) <= rank_floor)
            throw numerical_error("build_model: num_bases exceeds the rank of the aligned shape data");
        bases.reserve(static_cast<std::size_t>(num_bases));
        for (int k = 0; k < num_bases; ++k)
        {
            Eigen::VectorXd v = svd.matrixV().col(k);
            // Deterministic sign: largest-magnitude entry positive.
            Eigen::Index imax;
            v.cwiseAbs().maxCoeff(&imax);
            if (v(imax) < 0.0)
                v = -v;
            Shape3D b = Shape3D::Zero(4, n);
            b.topRows<3>() = Eigen::Map<const Eigen::Matrix3Xd>(v.data(), 3, n);
            bases.push_back(std::move(b));
        }
    }

    // Mean surface normals: rotate by each scan's Procrustes rotation,
    // average, renormalize.
    Eigen::Matrix3Xd normals = Eigen::Matrix3Xd::Zero(3, n);
    for (std::size_t i = 0; i < count; ++i)
        normals += rotations[i] * scans[i].normals;
    normals /= static_cast<double>(count);
    for (Eigen::Index j = 0; j < n; ++j)
    {
        const double norm = normals.col(j).norm();
        if (norm < 1e-6)
            throw numerical_error("build_model: mean surface normal is ill-defined (near-zero) at a landmark");
        normals.col(j) /= norm;
    }

    return DeformableModel(homogenize(mean), std::move(bases), std::move(normals));
}

Shape3D instantiate(const DeformableModel& model, const ShapeParams& params)
{
    if (params.p.size() != model.num_bases())
        throw validation_error("instantiate: coefficient count does not match the model");
    Shape3D s = model.mean_shape();
    for (int i = 0; i < model.num_bases(); ++i)
        s += params.p(i) * model.basis(i);
    return s;
}

} // namespace fa3d
