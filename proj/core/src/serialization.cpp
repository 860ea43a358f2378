/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/serialization.cpp
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
#include "fa3d/io.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fa3d {

namespace {

constexpr int kFormatVersion = 1;

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m)
{
    out << name << " " << m.rows() << " " << m.cols();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out << " " << fmt(m(r, c));
    out << "\n";
}

/// Whitespace token reader with malformed-document diagnostics.
class TokenReader
{
public:
    explicit TokenReader(std::istream& in) : in_(in) {}

    std::string token()
    {
        std::string tok;
        if (!(in_ >> tok))
            throw validation_error("model document is truncated or malformed");
        return tok;
    }

    void expect(const std::string& want)
    {
        const std::string got = token();
        if (got != want)
            throw validation_error("malformed model document: expected '" + want + "', found '" + got + "'");
    }

    long integer()
    {
        const std::string tok = token();
        try
        {
            return std::stol(tok);
        }
        catch (...)
        {
            throw validation_error("malformed model document: expected integer, found '" + tok + "'");
        }
    }

    double number()
    {
        const std::string tok = token();
        double v{};
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
            throw validation_error("malformed model document: expected number, found '" + tok + "'");
        return v;
    }

    Eigen::MatrixXd matrix(const std::string& name)
    {
        expect(name);
        const long rows = integer();
        const long cols = integer();
        if (rows < 0 || cols < 0 || rows * cols > 100'000'000L)
            throw validation_error("malformed model document: implausible matrix dimensions for " + name);
        Eigen::MatrixXd m(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c)
                m(r, c) = number();
        return m;
    }

private:
    std::istream& in_;
};

void check_header(TokenReader& r)
{
    r.expect("fa3d-model");
    const long version = r.integer();
    if (version != kFormatVersion)
        throw validation_error("model document version mismatch: found " + std::to_string(version) +
                               ", expected " + std::to_string(kFormatVersion));
}

void write_feature(std::ostream& out, const ShapeIndexedFeature& f)
{
    out << "feature " << f.anchor_landmark << " " << fmt(f.offset_a.x()) << " " << fmt(f.offset_a.y()) << " "
        << fmt(f.offset_b.x()) << " " << fmt(f.offset_b.y()) << " " << fmt(f.threshold) << "\n";
}

ShapeIndexedFeature read_feature(TokenReader& r)
{
    r.expect("feature");
    ShapeIndexedFeature f;
    f.anchor_landmark = static_cast<int>(r.integer());
    f.offset_a.x() = r.number();
    f.offset_a.y() = r.number();
    f.offset_b.x() = r.number();
    f.offset_b.y() = r.number();
    f.threshold = r.number();
    return f;
}

void write_fern_layer(std::ostream& out, const FernLayer& layer)
{
    for (int slot = 0; slot < FernLayer::kZones; ++slot)
    {
        out << "zone " << layer.zones[static_cast<std::size_t>(slot)] << " "
            << fmt(layer.zone_weights[static_cast<std::size_t>(slot)]) << "\n";
        const Fern& fern = layer.ferns[static_cast<std::size_t>(slot)];
        for (const auto& f : fern.features)
            write_feature(out, f);
        write_matrix(out, "bins", fern.bin_outputs);
    }
}

FernLayer read_fern_layer(TokenReader& r)
{
    FernLayer layer;
    for (int slot = 0; slot < FernLayer::kZones; ++slot)
    {
        r.expect("zone");
        layer.zones[static_cast<std::size_t>(slot)] = static_cast<int>(r.integer());
        layer.zone_weights[static_cast<std::size_t>(slot)] = r.number();
        Fern& fern = layer.ferns[static_cast<std::size_t>(slot)];
        for (auto& f : fern.features)
            f = read_feature(r);
        fern.bin_outputs = r.matrix("bins");
        if (fern.bin_outputs.cols() != Fern::kBins)
            throw validation_error("malformed model document: fern must have 32 bins");
    }
    return layer;
}

} // namespace

std::string serialize_model(const DeformableModel& model)
{
    std::ostringstream out;
    out << "fa3d-model " << kFormatVersion << "\n";
    out << "kind deformable\n";
    out << "landmarks " << model.num_landmarks() << "\n";
    out << "num_bases " << model.num_bases() << "\n";
    write_matrix(out, "mean_shape", model.mean_shape());
    for (int i = 0; i < model.num_bases(); ++i)
        write_matrix(out, "basis", model.basis(i));
    write_matrix(out, "normals", model.normals());
    out << "end\n";
    return out.str();
}

std::string serialize_model(const CascadeModel& model)
{
    std::ostringstream out;
    out << "fa3d-model " << kFormatVersion << "\n";
    out << "kind " << (model.kind == RegressorKind::Linear ? "cascade-linear" : "cascade-fern") << "\n";
    out << "layers " << model.num_layers() << "\n";
    out << "model_hash " << model.model_hash << "\n";
    out << "hog " << fmt(model.hog.patch_scale) << " " << model.hog.cells << " " << model.hog.orientation_bins << " "
        << fmt(model.hog.epsilon) << " " << model.hog.min_patch_px << "\n";
    write_matrix(out, "mean_m", model.mean_m.m);
    for (int k = 0; k < model.num_layers(); ++k)
    {
        out << "layer " << k << "\n";
        if (model.kind == RegressorKind::Linear)
        {
            const auto& rm = model.linear_m[static_cast<std::size_t>(k)];
            const auto& rp = model.linear_p[static_cast<std::size_t>(k)];
            out << "lambda " << fmt(rm.lambda) << "\n";
            write_matrix(out, "theta_m", rm.theta);
            write_matrix(out, "theta_p", rp.theta);
        }
        else
        {
            write_fern_layer(out, model.fern_m[static_cast<std::size_t>(k)]);
            write_fern_layer(out, model.fern_p[static_cast<std::size_t>(k)]);
        }
    }
    out << "end\n";
    return out.str();
}

void save_model(const std::filesystem::path& path, const DeformableModel& model)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw validation_error("save_model: cannot write " + path.string());
    out << serialize_model(model);
}

namespace {

DeformableModel parse_deformable(TokenReader& r)
{
    r.expect("kind");
    r.expect("deformable");
    r.expect("landmarks");
    const long n = r.integer();
    r.expect("num_bases");
    const long ns = r.integer();

    const Eigen::MatrixXd mean = r.matrix("mean_shape");
    if (mean.rows() != 4 || mean.cols() != n)
        throw validation_error("load_deformable_model: mean shape dimensions inconsistent with header");
    std::vector<Shape3D> bases;
    bases.reserve(static_cast<std::size_t>(ns));
    for (long i = 0; i < ns; ++i)
    {
        const Eigen::MatrixXd b = r.matrix("basis");
        if (b.rows() != 4 || b.cols() != n)
            throw validation_error("load_deformable_model: basis dimensions inconsistent with header");
        bases.push_back(b);
    }
    const Eigen::MatrixXd normals = r.matrix("normals");
    if (normals.rows() != 3 || normals.cols() != n)
        throw validation_error("load_deformable_model: normals dimensions inconsistent with header");
    r.expect("end");
    return DeformableModel(mean, std::move(bases), normals);
}

CascadeModel parse_cascade(TokenReader& r)
{
    r.expect("kind");
    const std::string kind = r.token();
    CascadeModel model;
    if (kind == "cascade-linear")
        model.kind = RegressorKind::Linear;
    else if (kind == "cascade-fern")
        model.kind = RegressorKind::Fern;
    else
        throw validation_error("load_cascade_model: unknown kind '" + kind + "'");

    r.expect("layers");
    const long layers = r.integer();
    r.expect("model_hash");
    model.model_hash = static_cast<std::uint64_t>(std::stoull(r.token()));
    r.expect("hog");
    model.hog.patch_scale = r.number();
    model.hog.cells = static_cast<int>(r.integer());
    model.hog.orientation_bins = static_cast<int>(r.integer());
    model.hog.epsilon = r.number();
    model.hog.min_patch_px = static_cast<int>(r.integer());
    const Eigen::MatrixXd mean_m = r.matrix("mean_m");
    if (mean_m.rows() != 2 || mean_m.cols() != 4)
        throw validation_error("load_cascade_model: mean_m must be 2x4");
    model.mean_m.m = mean_m;

    for (long k = 0; k < layers; ++k)
    {
        r.expect("layer");
        if (r.integer() != k)
            throw validation_error("load_cascade_model: layer records out of order");
        if (model.kind == RegressorKind::Linear)
        {
            r.expect("lambda");
            const double lambda = r.number();
            LinearRegressor rm, rp;
            rm.lambda = rp.lambda = lambda;
            rm.theta = r.matrix("theta_m");
            rp.theta = r.matrix("theta_p");
            model.linear_m.push_back(std::move(rm));
            model.linear_p.push_back(std::move(rp));
        }
        else
        {
            model.fern_m.push_back(read_fern_layer(r));
            model.fern_p.push_back(read_fern_layer(r));
        }
    }
    r.expect("end");
    return model;
}

} // namespace

DeformableModel load_deformable_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("load_deformable_model: cannot open " + path.string());
    TokenReader r(in);
    check_header(r);
    return parse_deformable(r);
}

void save_cascade(const std::filesystem::path& path, const CascadeModel& cascade, const DeformableModel& model)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw validation_error("save_cascade: cannot write " + path.string());
    out << serialize_model(cascade) << serialize_model(model);
}

CascadeBundle load_cascade(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("load_cascade: cannot open " + path.string());
    TokenReader r(in);
    check_header(r);
    CascadeBundle bundle;
    bundle.cascade = parse_cascade(r);
    check_header(r);
    bundle.model = parse_deformable(r);
    if (bundle.cascade.model_hash != bundle.model.content_hash())
        throw validation_error("load_cascade: embedded model does not match the cascade's model hash");
    return bundle;
}

} // namespace fa3d
