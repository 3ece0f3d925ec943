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

#include "tsq/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace tsq {

namespace {

struct NamedTensor {
  std::string name;
  Matrix* tensor;
};

std::vector<NamedTensor> tensors_of(ModelParams& params) {
  std::vector<NamedTensor> out;
  params.visit([&](const std::string& name, Matrix& m) { out.push_back({name, &m}); });
  return out;
}

std::vector<const Matrix*> tensors_of(const ModelParams& params) {
  std::vector<const Matrix*> out;
  params.visit([&](const std::string&, const Matrix& m) { out.push_back(&m); });
  return out;
}

}  // namespace

OptimizerState make_optimizer(const ModelParams& params, double momentum, double lr) {
  return {zeros_like(params), momentum, lr};
}

void sgd_step(ModelParams& params, const ModelParams& grads, OptimizerState& state) {
  auto p = tensors_of(params);
  const auto g = tensors_of(grads);
  auto v = tensors_of(state.velocity);
  if (p.size() != g.size() || p.size() != v.size())
    throw DimensionError("sgd: parameter, gradient and velocity layouts differ");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i].tensor->rows() != g[i]->rows() || p[i].tensor->cols() != g[i]->cols())
      throw DimensionError("sgd: gradient shape differs for " + p[i].name);
    if (!g[i]->allFinite()) throw NumericError("sgd: non-finite gradient for " + p[i].name);
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    Matrix& velocity = *v[i].tensor;
    velocity = state.momentum * velocity + *g[i];
    *p[i].tensor -= state.lr * velocity;
  }
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch size must be >= 1");
  if (!(base_lr > 0.0)) throw ConfigError("train: learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train: momentum must be in [0,1)");
  if (!std::is_sorted(decay_epochs.begin(), decay_epochs.end()))
    throw ConfigError("train: decay epochs must be sorted ascending");
  loss_weights.validate();
}

TrainConfig TrainConfig::long_schedule() {
  TrainConfig c;
  c.epochs = 100;
  c.batch_size = 64;
  c.base_lr = 1e-2;
  c.decay_factor = 0.1;
  c.decay_epochs = {25, 50, 75};
  c.momentum = 0.9;
  return c;
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},
       {"batch_size", c.batch_size},
       {"base_lr", c.base_lr},
       {"decay_factor", c.decay_factor},
       {"decay_epochs", c.decay_epochs},
       {"momentum", c.momentum},
       {"seed", c.seed},
       {"alpha", c.loss_weights.alpha},
       {"beta", c.loss_weights.beta},
       {"divergence_threshold", c.divergence_threshold}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.base_lr = j.value("base_lr", c.base_lr);
  c.decay_factor = j.value("decay_factor", c.decay_factor);
  c.decay_epochs = j.value("decay_epochs", c.decay_epochs);
  c.momentum = j.value("momentum", c.momentum);
  c.seed = j.value("seed", c.seed);
  c.loss_weights.alpha = j.value("alpha", c.loss_weights.alpha);
  c.loss_weights.beta = j.value("beta", c.loss_weights.beta);
  c.divergence_threshold = j.value("divergence_threshold", c.divergence_threshold);
}

double lr_at(int epoch, const TrainConfig& config) {
  if (epoch < 0) throw ConfigError("lr_at: epoch must be >= 0");
  double lr = config.base_lr;
  for (int boundary : config.decay_epochs) {
    if (boundary <= epoch) lr *= config.decay_factor;
  }
  return lr;
}

void to_json(nlohmann::json& j, const EpochLog& log) {
  j = {{"epoch", log.epoch},
       {"lr", log.lr},
       {"loss", log.loss},
       {"visual_loss", log.visual_loss},
       {"textual_loss", log.textual_loss},
       {"visual_top1", log.visual_top1},
       {"textual_top1", log.textual_top1}};
}

namespace {

struct BatchStats {
  double loss = 0.0;
  double visual_loss = 0.0;
  double textual_loss = 0.0;
  int visual_correct = 0;
  int textual_correct = 0;
};

ModelParams accumulate_batch(const ModelParams& params, const std::vector<TrainingSample>& samples,
                             const std::vector<std::size_t>& indices, const LossWeights& weights,
                             BatchStats& stats) {
  ModelParams grad = zeros_like(params);
  const double scale = 1.0 / static_cast<double>(indices.size());
  for (std::size_t i : indices) {
    const TrainingSample& sample = samples[i];
    const ObjectiveResult r = evaluate_objective(params, sample, weights, &grad, scale);
    stats.loss += r.loss.total;
    stats.visual_loss += r.loss.visual;
    stats.textual_loss += r.loss.textual;
    stats.visual_correct += argmax(r.visual_logits) == sample.label;
    stats.textual_correct += argmax(r.textual_logits) == sample.label;
  }
  return grad;
}

}  // namespace

ModelParams batch_gradient(const ModelParams& params, const std::vector<TrainingSample>& samples,
                           const std::vector<std::size_t>& indices, const LossWeights& weights,
                           double* mean_loss) {
  BatchStats stats;
  ModelParams grad = accumulate_batch(params, samples, indices, weights, stats);
  if (mean_loss != nullptr) *mean_loss = stats.loss / static_cast<double>(indices.size());
  return grad;
}

TrainResult train(const std::vector<TrainingSample>& samples, ModelParams params,
                  const TrainConfig& config, const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  TrainResult result;
  if (config.epochs == 0) {
    result.params = std::move(params);
    return result;
  }
  if (samples.empty()) throw ConfigError("train: empty dataset");

  OptimizerState state = make_optimizer(params, config.momentum, config.base_lr);
  Rng rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto n = static_cast<double>(samples.size());

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    state.lr = lr_at(epoch, config);
    std::shuffle(order.begin(), order.end(), rng);
    BatchStats epoch_stats;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(stop));
      BatchStats stats;
      const ModelParams grad = accumulate_batch(params, samples, batch, config.loss_weights, stats);
      const double batch_loss = stats.loss / static_cast<double>(batch.size());
      if (!std::isfinite(batch_loss) || batch_loss > config.divergence_threshold)
        throw NumericError("train: diverged at epoch " + std::to_string(epoch) +
                           " (batch loss " + std::to_string(batch_loss) + ")");
      sgd_step(params, grad, state);
      epoch_stats.loss += stats.loss;
      epoch_stats.visual_loss += stats.visual_loss;
      epoch_stats.textual_loss += stats.textual_loss;
      epoch_stats.visual_correct += stats.visual_correct;
      epoch_stats.textual_correct += stats.textual_correct;
    }
    EpochLog log{epoch,
                 state.lr,
                 epoch_stats.loss / n,
                 epoch_stats.visual_loss / n,
                 epoch_stats.textual_loss / n,
                 epoch_stats.visual_correct / n,
                 epoch_stats.textual_correct / n};
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  result.params = std::move(params);
  return result;
}

// ---------------------------------------------------------------------------
// Gradient check

std::vector<std::string> GradcheckReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (!e.passed) out.push_back(e.name);
  return out;
}

void to_json(nlohmann::json& j, const GradcheckReport& report) {
  j = nlohmann::json{{"passed", report.passed},
                     {"tolerance", report.tolerance},
                     {"max_relative_error", report.max_relative_error},
                     {"tensors", nlohmann::json::array()}};
  for (const auto& e : report.entries) {
    j["tensors"].push_back({{"name", e.name},
                            {"max_relative_error", e.max_relative_error},
                            {"max_abs_error", e.max_abs_error},
                            {"checked", e.checked},
                            {"passed", e.passed}});
  }
}

GradcheckReport gradcheck(const ModelParams& params, const LossFunction& loss,
                          const GradientFunction& gradient, const GradcheckOptions& options) {
  GradcheckReport report;
  report.tolerance = options.tolerance;
  const ModelParams analytic = gradient(params);
  const auto analytic_tensors = tensors_of(analytic);

  ModelParams probe = params;
  auto probe_tensors = tensors_of(probe);
  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    GradcheckEntry entry;
    entry.name = probe_tensors[t].name;
    Matrix& tensor = *probe_tensors[t].tensor;
    const Matrix& exact = *analytic_tensors[t];
    for (Eigen::Index i = 0; i < tensor.size(); ++i) {
      double& value = tensor.data()[i];
      const double saved = value;
      value = saved + options.step;
      const double plus = loss(probe);
      value = saved - options.step;
      const double minus = loss(probe);
      value = saved;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double a = exact.data()[i];
      const double abs_error = std::abs(a - numeric);
      const double rel_error =
          abs_error / std::max({std::abs(a), std::abs(numeric), options.floor});
      entry.max_abs_error = std::max(entry.max_abs_error, abs_error);
      entry.max_relative_error = std::max(entry.max_relative_error, rel_error);
      ++entry.checked;
    }
    entry.passed = entry.max_relative_error <= options.tolerance;
    report.max_relative_error = std::max(report.max_relative_error, entry.max_relative_error);
    report.passed = report.passed && entry.passed;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

GradcheckReport gradcheck_objective(const ModelParams& params, const TrainingSample& sample,
                                    const LossWeights& weights,
                                    const GradcheckOptions& options) {
  auto loss = [&](const ModelParams& p) { return evaluate_objective(p, sample, weights).loss.total; };
  auto gradient = [&](const ModelParams& p) {
    ModelParams grad = zeros_like(p);
    evaluate_objective(p, sample, weights, &grad);
    return grad;
  };
  return gradcheck(params, loss, gradient, options);
}

}  // namespace tsq
