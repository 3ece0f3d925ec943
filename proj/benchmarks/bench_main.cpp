// Copyright 2026 The TSQ Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Micro benchmarks for the hot paths: the objective with its gradient, a
// forward pass of one attention layer, frame fusion and mAP.

#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "tsq/common.hpp"
#include "tsq/interaction.hpp"
#include "tsq/metrics.hpp"
#include "tsq/model.hpp"
#include "tsq/sampler.hpp"

namespace {

tsq::ModelConfig desk_config(int classes) {
  tsq::ModelConfig c;
  c.classes = classes;
  return c;
}

tsq::TrainingSample random_sample(const tsq::ModelConfig& c, int frames, tsq::Rng& rng) {
  return {"bench", tsq::gaussian_matrix(frames, c.visual_dim, 1.0, rng),
          tsq::gaussian_matrix(frames, c.text_dim, 1.0, rng), 0};
}

void BM_ObjectiveWithGradient(benchmark::State& state) {
  const tsq::ModelConfig config = desk_config(static_cast<int>(state.range(0)));
  tsq::Rng rng(1);
  const tsq::ModelParams params = tsq::init_model(config, rng);
  const tsq::TrainingSample sample = random_sample(config, 16, rng);
  tsq::ModelParams grad = tsq::zeros_like(params);
  for (auto _ : state) {
    const auto result = tsq::evaluate_objective(params, sample, {0.6, 0.6}, &grad);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_ObjectiveWithGradient)->Arg(10)->Arg(50);

void BM_AttentionForward(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  tsq::Rng rng(2);
  const tsq::ModelParams params = tsq::init_model(desk_config(10), rng);
  const auto& layer = params.visual.layers[0].attention;
  const tsq::Matrix queries = tsq::gaussian_matrix(10, layer.w_q.rows(), 1.0, rng);
  const tsq::Matrix x = tsq::gaussian_matrix(frames, layer.w_k.rows(), 1.0, rng);
  const tsq::Matrix positional = tsq::gaussian_matrix(frames, layer.w_k.rows(), 0.1, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tsq::tsq_attention(queries, x, layer, positional, true));
  }
}
BENCHMARK(BM_AttentionForward)->Arg(16)->Arg(64);

void BM_FuseAndSelect(benchmark::State& state) {
  const int frames = static_cast<int>(state.range(0));
  tsq::Rng rng(3);
  const tsq::SaliencyScores visual{tsq::gaussian_matrix(frames, 1, 1.0, rng).col(0),
                                   tsq::SaliencySource::Visual};
  const tsq::SaliencyScores textual{tsq::gaussian_matrix(frames, 1, 1.0, rng).col(0),
                                    tsq::SaliencySource::Textual};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tsq::fuse_and_select(visual, textual, frames / 4, 0.6, 0.4));
  }
}
BENCHMARK(BM_FuseAndSelect)->Arg(16)->Arg(256);

void BM_MeanAveragePrecision(benchmark::State& state) {
  const int videos = static_cast<int>(state.range(0));
  const int classes = 50;
  tsq::Rng rng(4);
  const tsq::Matrix scores = tsq::gaussian_matrix(videos, classes, 1.0, rng);
  std::vector<int> labels(videos);
  for (int i = 0; i < videos; ++i) labels[i] = i % classes;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tsq::mean_average_precision(scores, labels));
  }
}
BENCHMARK(BM_MeanAveragePrecision)->Arg(200)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
