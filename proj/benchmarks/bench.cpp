/*
 * fa3d - pose-invariant 3D face alignment from 2D landmarks.
 *
 * File: benchmarks/bench.cpp
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
#include "fa3d/camera.hpp"
#include "fa3d/cascade.hpp"
#include "fa3d/features.hpp"
#include "fa3d/gt_fit.hpp"
#include "fa3d/synth.hpp"

#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

using namespace fa3d;

namespace {

/// Shared fixture: small synthetic dataset plus a short trained cascade.
struct BenchData
{
    DeformableModel model;
    std::vector<SynthSample> samples;
    CascadeModel cascade;

    BenchData()
    {
        SynthConfig cfg;
        cfg.num_images = 40;
        cfg.num_landmarks = 21;
        cfg.num_bases = 4;
        cfg.yaw_range = M_PI / 4.0;
        cfg.seed = 1234;
        auto [m, scans] = make_base_model(cfg);
        model = std::move(m);
        samples = generate(model, cfg);

        std::vector<TrainSample> dataset;
        for (const SynthSample& s : samples)
            dataset.push_back(TrainSample{&s.image, s.annotation, s.true_m, s.true_p});
        TrainConfig tc;
        tc.layers = 5;
        cascade = train(dataset, model, tc);
    }
};

const BenchData& data()
{
    static const BenchData d;
    return d;
}

void bm_project(benchmark::State& state)
{
    const BenchData& d = data();
    const Shape3D shape = instantiate(d.model, d.samples[0].true_p);
    const ProjectionMatrix& m = d.samples[0].true_m;
    for (auto _ : state)
        benchmark::DoNotOptimize(project(m, shape));
}

void bm_visibility(benchmark::State& state)
{
    const BenchData& d = data();
    const ProjectionMatrix& m = d.samples[0].true_m;
    for (auto _ : state)
        benchmark::DoNotOptimize(visibility(m, d.model.normals(), VisibilityVector::Mode::Soft));
}

void bm_hog_descriptor(benchmark::State& state)
{
    const BenchData& d = data();
    const SynthSample& s = d.samples[0];
    const Landmarks2D u = current_landmarks(s.true_m, s.true_p, d.model);
    for (auto _ : state)
        benchmark::DoNotOptimize(hog_descriptor(s.image, u, s.annotation.bbox));
}

void bm_gt_fit(benchmark::State& state)
{
    const BenchData& d = data();
    const SynthSample& s = d.samples[0];
    for (auto _ : state)
        benchmark::DoNotOptimize(fit(s.annotation, d.model));
}

void bm_align(benchmark::State& state)
{
    const BenchData& d = data();
    const SynthSample& s = d.samples[1];
    for (auto _ : state)
        benchmark::DoNotOptimize(align(d.cascade, s.image, s.annotation.bbox, d.model));
}

BENCHMARK(bm_project);
BENCHMARK(bm_visibility);
BENCHMARK(bm_hog_descriptor);
BENCHMARK(bm_gt_fit);
BENCHMARK(bm_align);

} // namespace

BENCHMARK_MAIN();
