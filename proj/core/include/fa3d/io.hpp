/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: core/include/fa3d/io.hpp
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
#pragma once

#ifndef FA3D_IO_HPP
#define FA3D_IO_HPP

#include "fa3d/cascade.hpp"
#include "fa3d/eval.hpp"
#include "fa3d/gt_fit.hpp"
#include "fa3d/shape_model.hpp"
#include "fa3d/synth.hpp"
#include "fa3d/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fa3d {

// ---------------------------------------------------------------- images

/// Loads an 8-bit grayscale PGM (P2/P5) or PNG image, rescaled to [0,1].
Image load_image(const std::filesystem::path& path);

/// Writes a binary 8-bit PGM (P5).
void save_pgm(const std::filesystem::path& path, const Image& img);

// --------------------------------------------------------------- scans

/// One CSV per scan with rows x,y,z[,nx,ny,nz]; the manifest lists scan
/// paths (relative to its own directory) one per line.
std::vector<LandmarkScan> load_scans(const std::filesystem::path& manifest);
void save_scans(const std::filesystem::path& dir, const std::vector<LandmarkScan>& scans,
                const std::string& manifest_name = "scans.txt");

// ------------------------------------------------------- model documents

/// Versioned structured text documents; payload numbers carry 17
/// significant digits so binary64 values round-trip exactly.
void save_model(const std::filesystem::path& path, const DeformableModel& model);
DeformableModel load_deformable_model(const std::filesystem::path& path);

/// Cascade files are self-contained: the trained cascade followed by the
/// deformable model it was trained against.
struct CascadeBundle
{
    CascadeModel cascade;
    DeformableModel model;
};
void save_cascade(const std::filesystem::path& path, const CascadeModel& cascade, const DeformableModel& model);
CascadeBundle load_cascade(const std::filesystem::path& path);

/// In-memory serialization used by the round-trip and determinism checks.
std::string serialize_model(const DeformableModel& model);
std::string serialize_model(const CascadeModel& model);

// ------------------------------------------------------------- datasets

struct DatasetEntry
{
    std::string image_path; // as listed in the CSV
    Annotation annotation;
    std::optional<ProjectionMatrix> gt_m;
    std::optional<ShapeParams> gt_p;
};

struct DatasetManifest
{
    std::filesystem::path root;
    std::vector<DatasetEntry> entries;
    int num_landmarks = 0;

    std::filesystem::path resolve(const std::string& image_path) const { return root / image_path; }
};

/// Parses the annotation CSV (rows: image_path, bx, by, bw, bh,
/// u1, v1, vis1, ..., uN, vN, visN) and, if present, the companion
/// ground-truth CSV <manifest stem>.gt.csv (or an explicit gt path).
DatasetManifest load_dataset(const std::filesystem::path& manifest,
                             const std::optional<std::filesystem::path>& gt_path = std::nullopt,
                             bool check_images = true);

/// Writes a generated synthetic dataset: images/, the annotation CSV, the
/// ground-truth CSV, the scan set, and the model document.
void save_dataset(const std::filesystem::path& dir, const std::vector<SynthSample>& samples,
                  const DeformableModel& model, const std::vector<LandmarkScan>& scans);

/// Ground-truth CSV rows: image_path, 8 projection entries (row major), p.
void save_ground_truth(const std::filesystem::path& path, const std::vector<std::string>& image_paths,
                       const std::vector<ProjectionMatrix>& ms, const std::vector<ShapeParams>& ps);

// ---------------------------------------------------------- predictions

struct PredictionRecord
{
    std::string image_path;
    double yaw = 0.0; // estimated, radians
    Landmarks2D landmarks;
};

void save_predictions(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);

/// Writes global.csv, per_bin.csv and per_landmark.csv into dir.
void save_eval_results(const std::filesystem::path& dir, double mape_value, double nme_value,
                       const Breakdown& breakdown);

} // namespace fa3d

#endif /* FA3D_IO_HPP */
