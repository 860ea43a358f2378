/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: tools/fa3d_cli.cpp
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
#include "fa3d/eval.hpp"
#include "fa3d/gt_fit.hpp"
#include "fa3d/io.hpp"
#include "fa3d/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using nlohmann::json;

fa3d::SynthConfig read_synth_config(const std::string& path)
{
    fa3d::SynthConfig cfg;
    if (path.empty())
        return cfg;
    std::ifstream in(path);
    if (!in)
        throw fa3d::validation_error("synth: cannot open config " + path);
    json doc;
    try
    {
        in >> doc;
    }
    catch (const json::exception& e)
    {
        throw fa3d::validation_error(std::string("synth: malformed config: ") + e.what());
    }
    auto get = [&doc](const char* key, auto& field) {
        if (doc.contains(key))
            field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("num_images", cfg.num_images);
    get("image_width", cfg.image_width);
    get("image_height", cfg.image_height);
    get("num_landmarks", cfg.num_landmarks);
    get("num_bases", cfg.num_bases);
    get("yaw_range", cfg.yaw_range);
    get("pitch_range", cfg.pitch_range);
    get("roll_range", cfg.roll_range);
    get("scale_min", cfg.scale_min);
    get("scale_max", cfg.scale_max);
    get("shape_std", cfg.shape_std);
    get("shape_std_default", cfg.shape_std_default);
    get("noise_std", cfg.noise_std);
    get("bbox_translation_fraction", cfg.bbox_perturb.translation_fraction);
    get("bbox_scale_fraction", cfg.bbox_perturb.scale_fraction);
    get("num_scans", cfg.num_scans);
    get("scan_coeff_std", cfg.scan_coeff_std);
    get("seed", cfg.seed);
    return cfg;
}

fa3d::BoundingBox parse_bbox(const std::string& spec)
{
    fa3d::BoundingBox b;
    if (std::sscanf(spec.c_str(), "%lf,%lf,%lf,%lf", &b.x, &b.y, &b.width, &b.height) != 4 || !b.valid())
        throw fa3d::validation_error("align: --bbox must be x,y,w,h with positive size");
    return b;
}

std::vector<fa3d::TrainSample> build_train_samples(const fa3d::DatasetManifest& manifest,
                                                   std::vector<fa3d::Image>& images)
{
    images.reserve(manifest.entries.size());
    std::vector<fa3d::TrainSample> samples;
    samples.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries)
    {
        if (!entry.gt_m || !entry.gt_p)
            throw fa3d::validation_error("train: entry without ground truth: " + entry.image_path +
                                         " (run fit-gt first)");
        images.push_back(fa3d::load_image(manifest.resolve(entry.image_path)));
        samples.push_back(fa3d::TrainSample{nullptr, entry.annotation, *entry.gt_m, *entry.gt_p});
    }
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i].image = &images[i];
    return samples;
}

void write_trace(const std::filesystem::path& path, const fa3d::AlignmentResult& result)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw fa3d::validation_error("align: cannot write trace " + path.string());
    out << "layer,m11,m12,m13,m14,m21,m22,m23,m24,p...,soft_vis...\n";
    for (std::size_t k = 0; k < result.per_layer_trace.size(); ++k)
    {
        const auto& snap = result.per_layer_trace[k];
        out << k;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 4; ++c)
                out << "," << snap.m.m(r, c);
        for (Eigen::Index i = 0; i < snap.p.p.size(); ++i)
            out << "," << snap.p.p(i);
        for (Eigen::Index i = 0; i < snap.soft_vis.size(); ++i)
            out << "," << snap.soft_vis(i);
        out << "\n";
    }
}

int run(int argc, char** argv)
{
    CLI::App app{"pose-invariant 3D face alignment"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset with exact ground truth");
    std::string synth_config, synth_out;
    std::optional<std::uint64_t> synth_seed;
    synth_cmd->add_option("--config", synth_config, "JSON generator configuration");
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--seed", synth_seed, "RNG seed (overrides config)");

    // build-model
    auto* build_cmd = app.add_subcommand("build-model", "build a deformable model from labeled 3D scans");
    std::string build_scans, build_out;
    int build_num_bases = 10;
    build_cmd->add_option("--scans", build_scans, "scan manifest file")->required();
    build_cmd->add_option("--num-bases", build_num_bases, "number of PCA bases")->required();
    build_cmd->add_option("--out", build_out, "output model file")->required();

    // fit-gt
    auto* fit_cmd = app.add_subcommand("fit-gt", "fit ground-truth projection and shape to 2D annotations");
    std::string fit_dataset, fit_model, fit_out;
    double fit_tol = 1e-7;
    int fit_max_iters = 200;
    fit_cmd->add_option("--dataset", fit_dataset, "annotation CSV")->required();
    fit_cmd->add_option("--model", fit_model, "deformable model file")->required();
    fit_cmd->add_option("--tol", fit_tol, "convergence tolerance");
    fit_cmd->add_option("--max-iters", fit_max_iters, "iteration cap");
    fit_cmd->add_option("--out", fit_out, "output ground-truth CSV")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train the cascaded coupled-regressor");
    std::string train_dataset, train_model, train_kind = "linear", train_out, train_gt;
    int train_layers = -1;
    double train_lambda = 120.0;
    std::uint64_t train_seed = 0;
    train_cmd->add_option("--dataset", train_dataset, "annotation CSV")->required();
    train_cmd->add_option("--model", train_model, "deformable model file")->required();
    train_cmd->add_option("--kind", train_kind, "regressor kind: linear|fern")
        ->check(CLI::IsMember({"linear", "fern"}));
    train_cmd->add_option("--layers", train_layers, "cascade layer count (default 10 linear, 150 fern)");
    train_cmd->add_option("--lambda", train_lambda, "ridge weight (linear)");
    train_cmd->add_option("--seed", train_seed, "RNG seed");
    train_cmd->add_option("--gt", train_gt, "ground-truth CSV (default <dataset>.gt.csv)");
    train_cmd->add_option("--out", train_out, "output cascade file")->required();

    // align
    auto* align_cmd = app.add_subcommand("align", "align faces with a trained cascade");
    std::string align_cascade, align_image, align_bbox, align_trace, align_out, align_dataset;
    align_cmd->add_option("--cascade", align_cascade, "trained cascade file")->required();
    align_cmd->add_option("--image", align_image, "input image (PGM or PNG)");
    align_cmd->add_option("--bbox", align_bbox, "face bounding box x,y,w,h");
    align_cmd->add_option("--trace", align_trace, "write per-layer snapshots to this CSV");
    align_cmd->add_option("--dataset", align_dataset, "batch mode: align every entry of this annotation CSV");
    align_cmd->add_option("--out", align_out, "output predictions CSV")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate predictions against ground-truth annotations");
    std::string eval_dataset, eval_predictions, eval_bins, eval_out;
    eval_cmd->add_option("--dataset", eval_dataset, "annotation CSV with ground truth landmarks")->required();
    eval_cmd->add_option("--predictions", eval_predictions, "predictions CSV from align")->required();
    eval_cmd->add_option("--bins", eval_bins, "comma-separated yaw bin edges in degrees");
    eval_cmd->add_option("--out", eval_out, "output directory for metric CSVs")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (synth_cmd->parsed())
    {
        fa3d::SynthConfig cfg = read_synth_config(synth_config);
        if (synth_seed)
            cfg.seed = *synth_seed;
        auto [model, scans] = fa3d::make_base_model(cfg);
        const auto samples = fa3d::generate(model, cfg);
        fa3d::save_dataset(synth_out, samples, model, scans);
        std::cout << "wrote " << samples.size() << " samples to " << synth_out << "\n";
    }
    else if (build_cmd->parsed())
    {
        const auto scans = fa3d::load_scans(build_scans);
        const auto model = fa3d::build_model(scans, build_num_bases);
        fa3d::save_model(build_out, model);
        std::cout << "wrote model with " << model.num_landmarks() << " landmarks, " << model.num_bases()
                  << " bases to " << build_out << "\n";
    }
    else if (fit_cmd->parsed())
    {
        const auto manifest = fa3d::load_dataset(fit_dataset);
        const auto model = fa3d::load_deformable_model(fit_model);
        std::vector<std::string> paths;
        std::vector<fa3d::ProjectionMatrix> ms;
        std::vector<fa3d::ShapeParams> ps;
        for (const auto& entry : manifest.entries)
        {
            const fa3d::FitResult result = fa3d::fit(entry.annotation, model, fit_tol, fit_max_iters);
            if (!result.converged)
                std::cerr << "fit-gt: " << entry.image_path << " did not converge in " << result.iterations
                          << " iterations (residual " << result.residual << ")\n";
            paths.push_back(entry.image_path);
            ms.push_back(result.m);
            ps.push_back(result.p);
        }
        fa3d::save_ground_truth(fit_out, paths, ms, ps);
        std::cout << "wrote ground truth for " << paths.size() << " images to " << fit_out << "\n";
    }
    else if (train_cmd->parsed())
    {
        std::optional<std::filesystem::path> gt;
        if (!train_gt.empty())
            gt = train_gt;
        const auto manifest = fa3d::load_dataset(train_dataset, gt);
        const auto model = fa3d::load_deformable_model(train_model);

        fa3d::TrainConfig cfg;
        cfg.kind = train_kind == "fern" ? fa3d::RegressorKind::Fern : fa3d::RegressorKind::Linear;
        cfg.layers = train_layers > 0 ? train_layers : (cfg.kind == fa3d::RegressorKind::Fern ? 150 : 10);
        cfg.lambda = train_lambda;
        cfg.seed = train_seed;

        std::vector<fa3d::Image> images;
        const auto samples = build_train_samples(manifest, images);
        const fa3d::CascadeModel cascade = fa3d::train(samples, model, cfg, &std::cout);
        fa3d::save_cascade(train_out, cascade, model);
        std::cout << "wrote cascade (" << train_kind << ", " << cfg.layers << " layers) to " << train_out << "\n";
    }
    else if (align_cmd->parsed())
    {
        const fa3d::CascadeBundle bundle = fa3d::load_cascade(align_cascade);
        std::vector<fa3d::PredictionRecord> records;
        if (!align_dataset.empty())
        {
            const auto manifest = fa3d::load_dataset(align_dataset);
            for (const auto& entry : manifest.entries)
            {
                const fa3d::Image img = fa3d::load_image(manifest.resolve(entry.image_path));
                const fa3d::AlignmentResult result =
                    fa3d::align(bundle.cascade, img, entry.annotation.bbox, bundle.model);
                records.push_back(
                    fa3d::PredictionRecord{entry.image_path, fa3d::decompose(result.m).yaw, result.landmarks2d});
            }
        }
        else
        {
            if (align_image.empty() || align_bbox.empty())
                throw fa3d::validation_error("align: need --image and --bbox (or --dataset)");
            const fa3d::Image img = fa3d::load_image(align_image);
            const fa3d::AlignmentResult result =
                fa3d::align(bundle.cascade, img, parse_bbox(align_bbox), bundle.model, !align_trace.empty());
            if (!align_trace.empty())
                write_trace(align_trace, result);
            records.push_back(fa3d::PredictionRecord{align_image, fa3d::decompose(result.m).yaw, result.landmarks2d});
        }
        fa3d::save_predictions(align_out, records);
        std::cout << "wrote " << records.size() << " prediction rows to " << align_out << "\n";
    }
    else if (eval_cmd->parsed())
    {
        const auto manifest = fa3d::load_dataset(eval_dataset);
        const auto predictions = fa3d::load_predictions(eval_predictions);

        std::vector<fa3d::EvalRecord> records;
        for (const auto& pred : predictions)
        {
            const auto it = std::find_if(manifest.entries.begin(), manifest.entries.end(),
                                         [&](const auto& e) { return e.image_path == pred.image_path; });
            if (it == manifest.entries.end())
                throw fa3d::validation_error("eval: prediction for unknown image " + pred.image_path);
            fa3d::EvalRecord rec;
            rec.estimated = pred.landmarks;
            rec.truth = it->annotation.landmarks;
            rec.vis = it->annotation.vis;
            rec.d = it->annotation.bbox.side();
            rec.yaw = pred.yaw;
            records.push_back(std::move(rec));
        }

        std::vector<double> edges;
        if (eval_bins.empty())
        {
            edges = {-M_PI, M_PI};
        }
        else
        {
            std::istringstream in(eval_bins);
            std::string tok;
            while (std::getline(in, tok, ','))
                edges.push_back(std::stod(tok) * M_PI / 180.0);
            if (edges.size() < 2)
                throw fa3d::validation_error("eval: --bins needs at least two edges");
        }

        const double mape_value = fa3d::mape(records);
        const double nme_value = fa3d::nme(records);
        const fa3d::Breakdown bd = fa3d::breakdown(records, edges);
        fa3d::save_eval_results(eval_out, mape_value, nme_value, bd);
        std::cout << "mape=" << mape_value << " nme=" << nme_value << " (results in " << eval_out << ")\n";
    }

    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try
    {
        return run(argc, argv);
    }
    catch (const fa3d::numerical_error& e)
    {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
    catch (const fa3d::validation_error& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
