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

#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tsq/common.hpp"
#include "tsq/interaction.hpp"
#include "tsq/model.hpp"

namespace tsq {

// Heavy-ball momentum: v <- momentum * v + g; p <- p - lr * v.
struct OptimizerState {
  ModelParams velocity;
  double momentum = 0.9;
  double lr = 1e-2;
};

OptimizerState make_optimizer(const ModelParams& params, double momentum, double lr);

// Throws NumericError naming the first tensor with a non-finite gradient;
// parameters are left untouched in that case.
void sgd_step(ModelParams& params, const ModelParams& grads, OptimizerState& state);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 16;
  double base_lr = 1e-2;
  double decay_factor = 0.1;
  std::vector<int> decay_epochs{8, 16, 24};
  double momentum = 0.9;
  std::uint64_t seed = 0;
  LossWeights loss_weights;
  // A batch whose mean loss exceeds this aborts training.
  double divergence_threshold = 1e4;

  void validate() const;
  // The published schedule: 100 epochs, batch 64, decay at 25/50/75.
  static TrainConfig long_schedule();
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

// base_lr * decay_factor^(number of decay epochs <= epoch).
double lr_at(int epoch, const TrainConfig& config);

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;  // mean total loss over samples
  double visual_loss = 0.0;
  double textual_loss = 0.0;
  double visual_top1 = 0.0;  // coarse z^v accuracy on the training samples
  double textual_top1 = 0.0;
};

void to_json(nlohmann::json& j, const EpochLog& log);

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

// Mini-batch SGD on the mean per-batch objective. Shuffling is driven by
// `config.seed`; gradients are accumulated in sample order, so the run is a
// deterministic function of (samples, params, config).
TrainResult train(const std::vector<TrainingSample>& samples, ModelParams params,
                  const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

// Mean objective gradient over a batch of samples.
ModelParams batch_gradient(const ModelParams& params, const std::vector<TrainingSample>& samples,
                           const std::vector<std::size_t>& indices, const LossWeights& weights,
                           double* mean_loss = nullptr);

struct GradcheckEntry {
  std::string name;
  double max_relative_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t checked = 0;
  bool passed = true;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double max_relative_error = 0.0;
  double tolerance = 1e-4;
  bool passed = true;

  std::vector<std::string> failures() const;
};

void to_json(nlohmann::json& j, const GradcheckReport& report);

using LossFunction = std::function<double(const ModelParams&)>;
using GradientFunction = std::function<ModelParams(const ModelParams&)>;

struct GradcheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor of the relative error |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
};

// Compares the analytic gradient against central differences of `loss`, entry
// by entry, for every tensor of `params`.
GradcheckReport gradcheck(const ModelParams& params, const LossFunction& loss,
                          const GradientFunction& gradient, const GradcheckOptions& options = {});

// Gradcheck of the full objective on one sample.
GradcheckReport gradcheck_objective(const ModelParams& params, const TrainingSample& sample,
                                    const LossWeights& weights,
                                    const GradcheckOptions& options = {});

}  // namespace tsq
