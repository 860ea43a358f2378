/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/src/dataset.cpp
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
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace fa3d {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
    {
        // trim surrounding whitespace
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    return fields;
}

double parse_number(const std::string& tok, const std::string& context)
{
    if (tok == "nan" || tok == "NaN" || tok == "NAN")
        return std::numeric_limits<double>::quiet_NaN();
    double v{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw validation_error(context + ": non-numeric field '" + tok + "'");
    return v;
}

} // namespace

std::vector<LandmarkScan> load_scans(const std::filesystem::path& manifest)
{
    std::ifstream in(manifest);
    if (!in)
        throw validation_error("load_scans: cannot open manifest " + manifest.string());
    const std::filesystem::path root = manifest.parent_path();

    std::vector<LandmarkScan> scans;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        const std::filesystem::path scan_path = root / line;
        std::ifstream scan_in(scan_path);
        if (!scan_in)
            throw validation_error("load_scans: cannot open scan " + scan_path.string());

        std::vector<Eigen::Vector3d> points, normals;
        bool has_normals = true;
        std::string row;
        while (std::getline(scan_in, row))
        {
            if (row.empty())
                continue;
            const auto fields = split_csv(row);
            if (fields.size() != 3 && fields.size() != 6)
                throw validation_error("load_scans: rows must have 3 or 6 fields in " + scan_path.string());
            points.emplace_back(parse_number(fields[0], "load_scans"), parse_number(fields[1], "load_scans"),
                                parse_number(fields[2], "load_scans"));
            if (fields.size() == 6)
                normals.emplace_back(parse_number(fields[3], "load_scans"), parse_number(fields[4], "load_scans"),
                                     parse_number(fields[5], "load_scans"));
            else
                has_normals = false;
        }
        if (points.empty())
            throw validation_error("load_scans: empty scan file " + scan_path.string());

        LandmarkScan scan;
        scan.points.resize(3, static_cast<Eigen::Index>(points.size()));
        for (std::size_t j = 0; j < points.size(); ++j)
            scan.points.col(static_cast<Eigen::Index>(j)) = points[j];
        if (has_normals && normals.size() == points.size())
        {
            scan.normals.resize(3, static_cast<Eigen::Index>(normals.size()));
            for (std::size_t j = 0; j < normals.size(); ++j)
                scan.normals.col(static_cast<Eigen::Index>(j)) = normals[j];
        }
        scans.push_back(std::move(scan));
    }
    if (scans.empty())
        throw validation_error("load_scans: manifest lists no scans: " + manifest.string());
    return scans;
}

void save_scans(const std::filesystem::path& dir, const std::vector<LandmarkScan>& scans,
                const std::string& manifest_name)
{
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / manifest_name, std::ios::binary);
    if (!manifest)
        throw validation_error("save_scans: cannot write manifest in " + dir.string());
    for (std::size_t i = 0; i < scans.size(); ++i)
    {
        char name[32];
        std::snprintf(name, sizeof(name), "scan_%05zu.csv", i);
        manifest << name << "\n";
        std::ofstream out(dir / name, std::ios::binary);
        const auto& scan = scans[i];
        for (Eigen::Index j = 0; j < scan.points.cols(); ++j)
        {
            out << fmt(scan.points(0, j)) << "," << fmt(scan.points(1, j)) << "," << fmt(scan.points(2, j));
            if (scan.has_normals())
                out << "," << fmt(scan.normals(0, j)) << "," << fmt(scan.normals(1, j)) << ","
                    << fmt(scan.normals(2, j));
            out << "\n";
        }
    }
}

DatasetManifest load_dataset(const std::filesystem::path& manifest,
                             const std::optional<std::filesystem::path>& gt_path, bool check_images)
{
    std::ifstream in(manifest);
    if (!in)
        throw validation_error("load_dataset: cannot open " + manifest.string());

    DatasetManifest out;
    out.root = manifest.parent_path();

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        const auto fields = split_csv(line);
        const std::string ctx = "load_dataset (" + manifest.string() + ":" + std::to_string(line_no) + ")";
        if (fields.size() < 5 + 3 || (fields.size() - 5) % 3 != 0)
            throw validation_error(ctx + ": row arity must be 5 + 3N");
        const int n = static_cast<int>((fields.size() - 5) / 3);
        if (out.num_landmarks == 0)
            out.num_landmarks = n;
        else if (out.num_landmarks != n)
            throw validation_error(ctx + ": landmark count differs from previous rows");

        DatasetEntry entry;
        entry.image_path = fields[0];
        entry.annotation.bbox =
            BoundingBox{parse_number(fields[1], ctx), parse_number(fields[2], ctx), parse_number(fields[3], ctx),
                        parse_number(fields[4], ctx)};
        if (!entry.annotation.bbox.valid())
            throw validation_error(ctx + ": invalid bounding box");
        entry.annotation.landmarks.resize(2, n);
        entry.annotation.vis.resize(n);
        for (int j = 0; j < n; ++j)
        {
            const double u = parse_number(fields[static_cast<std::size_t>(5 + 3 * j)], ctx);
            const double v = parse_number(fields[static_cast<std::size_t>(6 + 3 * j)], ctx);
            const double vis = parse_number(fields[static_cast<std::size_t>(7 + 3 * j)], ctx);
            if (vis != 0.0 && vis != 1.0)
                throw validation_error(ctx + ": visibility must be 0 or 1");
            if (vis == 1.0 && (std::isnan(u) || std::isnan(v)))
                throw validation_error(ctx + ": visible landmark with nan coordinates");
            entry.annotation.landmarks(0, j) = u;
            entry.annotation.landmarks(1, j) = v;
            entry.annotation.vis(j) = vis;
        }
        if (check_images && !std::filesystem::exists(out.resolve(entry.image_path)))
            throw validation_error(ctx + ": referenced image does not exist: " + entry.image_path);
        out.entries.push_back(std::move(entry));
    }
    if (out.entries.empty())
        throw validation_error("load_dataset: no rows in " + manifest.string());

    // Companion ground truth: explicit path, or <stem>.gt.csv next to the manifest.
    std::filesystem::path gt = gt_path.value_or(manifest.parent_path() / (manifest.stem().string() + ".gt.csv"));
    std::ifstream gt_in(gt);
    if (gt_path && !gt_in)
        throw validation_error("load_dataset: cannot open ground truth " + gt.string());
    if (gt_in)
    {
        std::map<std::string, std::pair<ProjectionMatrix, ShapeParams>> by_path;
        line_no = 0;
        while (std::getline(gt_in, line))
        {
            ++line_no;
            if (line.empty() || line[0] == '#')
                continue;
            const auto fields = split_csv(line);
            const std::string ctx = "load_dataset gt (" + gt.string() + ":" + std::to_string(line_no) + ")";
            if (fields.size() < 9)
                throw validation_error(ctx + ": row needs image path, 8 projection entries and coefficients");
            ProjectionMatrix m;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 4; ++c)
                    m.m(r, c) = parse_number(fields[static_cast<std::size_t>(1 + 4 * r + c)], ctx);
            ShapeParams p;
            p.p.resize(static_cast<Eigen::Index>(fields.size()) - 9);
            for (Eigen::Index k = 0; k < p.p.size(); ++k)
                p.p(k) = parse_number(fields[static_cast<std::size_t>(9 + k)], ctx);
            by_path.emplace(fields[0], std::make_pair(m, std::move(p)));
        }
        for (auto& entry : out.entries)
        {
            const auto it = by_path.find(entry.image_path);
            if (it != by_path.end())
            {
                entry.gt_m = it->second.first;
                entry.gt_p = it->second.second;
            }
        }
    }
    return out;
}

void save_ground_truth(const std::filesystem::path& path, const std::vector<std::string>& image_paths,
                       const std::vector<ProjectionMatrix>& ms, const std::vector<ShapeParams>& ps)
{
    if (image_paths.size() != ms.size() || ms.size() != ps.size())
        throw validation_error("save_ground_truth: record lists do not align");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw validation_error("save_ground_truth: cannot write " + path.string());
    for (std::size_t i = 0; i < image_paths.size(); ++i)
    {
        out << image_paths[i];
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c)
                out << "," << fmt(ms[i].m(r, c));
        for (Eigen::Index k = 0; k < ps[i].p.size(); ++k)
            out << "," << fmt(ps[i].p(k));
        out << "\n";
    }
}

void save_dataset(const std::filesystem::path& dir, const std::vector<SynthSample>& samples,
                  const DeformableModel& model, const std::vector<LandmarkScan>& scans)
{
    std::filesystem::create_directories(dir / "images");
    std::ofstream ann(dir / "annotations.csv", std::ios::binary);
    if (!ann)
        throw validation_error("save_dataset: cannot write annotations in " + dir.string());

    std::vector<std::string> paths;
    std::vector<ProjectionMatrix> ms;
    std::vector<ShapeParams> ps;
    paths.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        char name[48];
        std::snprintf(name, sizeof(name), "images/img_%05zu.pgm", i);
        const auto& s = samples[i];
        save_pgm(dir / name, s.image);
        ann << name << "," << fmt(s.annotation.bbox.x) << "," << fmt(s.annotation.bbox.y) << ","
            << fmt(s.annotation.bbox.width) << "," << fmt(s.annotation.bbox.height);
        for (Eigen::Index j = 0; j < s.annotation.vis.size(); ++j)
        {
            if (s.annotation.vis(j) > 0.5)
                ann << "," << fmt(s.annotation.landmarks(0, j)) << "," << fmt(s.annotation.landmarks(1, j)) << ",1";
            else
                ann << ",nan,nan,0";
        }
        ann << "\n";
        paths.emplace_back(name);
        ms.push_back(s.true_m);
        ps.push_back(s.true_p);
    }
    save_ground_truth(dir / "annotations.gt.csv", paths, ms, ps);
    save_scans(dir / "scans", scans);
    save_model(dir / "model.txt", model);
}

void save_predictions(const std::filesystem::path& path, const std::vector<PredictionRecord>& records)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw validation_error("save_predictions: cannot write " + path.string());
    for (const auto& r : records)
    {
        out << r.image_path << "," << fmt(r.yaw);
        for (Eigen::Index j = 0; j < r.landmarks.cols(); ++j)
            out << "," << fmt(r.landmarks(0, j)) << "," << fmt(r.landmarks(1, j));
        out << "\n";
    }
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw validation_error("load_predictions: cannot open " + path.string());
    std::vector<PredictionRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        const auto fields = split_csv(line);
        const std::string ctx = "load_predictions (" + path.string() + ":" + std::to_string(line_no) + ")";
        if (fields.size() < 4 || (fields.size() - 2) % 2 != 0)
            throw validation_error(ctx + ": row arity must be 2 + 2N");
        PredictionRecord r;
        r.image_path = fields[0];
        r.yaw = parse_number(fields[1], ctx);
        const int n = static_cast<int>((fields.size() - 2) / 2);
        r.landmarks.resize(2, n);
        for (int j = 0; j < n; ++j)
        {
            r.landmarks(0, j) = parse_number(fields[static_cast<std::size_t>(2 + 2 * j)], ctx);
            r.landmarks(1, j) = parse_number(fields[static_cast<std::size_t>(3 + 2 * j)], ctx);
        }
        records.push_back(std::move(r));
    }
    return records;
}

void save_eval_results(const std::filesystem::path& dir, double mape_value, double nme_value,
                       const Breakdown& breakdown)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "global.csv", std::ios::binary);
        out << "metric,value\n";
        out << "mape," << fmt(mape_value) << "\n";
        out << "nme_percent," << fmt(nme_value) << "\n";
    }
    {
        std::ofstream out(dir / "per_bin.csv", std::ios::binary);
        out << "yaw_center_rad,nme_percent,count\n";
        for (std::size_t b = 0; b < breakdown.bin_centers.size(); ++b)
            out << fmt(breakdown.bin_centers[b]) << "," << fmt(breakdown.bin_nme[b]) << ","
                << breakdown.bin_counts[b] << "\n";
    }
    {
        std::ofstream out(dir / "per_landmark.csv", std::ios::binary);
        out << "landmark,nme_percent\n";
        for (std::size_t j = 0; j < breakdown.landmark_nme.size(); ++j)
            out << j << "," << fmt(breakdown.landmark_nme[j]) << "\n";
    }
}

} // namespace fa3d
