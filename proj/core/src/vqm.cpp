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

#include "tsq/vqm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsq {

Matrix LinearClassifier::logits(const Matrix& features) const {
  Matrix z = features * weight;
  z.rowwise() += bias.row(0);
  return z;
}

Vector LinearClassifier::logits(const Eigen::RowVectorXd& feature) const {
  return (feature * weight + bias.row(0)).transpose();
}

LinearClassifier fit_linear_classifier(const Matrix& features, const std::vector<int>& labels,
                                       int classes, const LinearFitConfig& config,
                                       std::uint64_t seed) {
  const Eigen::Index n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size())
    throw DimensionError("linear classifier: feature rows and labels differ in count");
  LinearClassifier model;
  model.weight = Matrix::Zero(features.cols(), classes);
  model.bias = Matrix::Zero(1, classes);
  if (n == 0) return model;

  Matrix v_weight = Matrix::Zero(features.cols(), classes);
  Matrix v_bias = Matrix::Zero(1, classes);
  Rng rng(seed);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const int batch = std::max(1, config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index stop = std::min<Eigen::Index>(n, start + batch);
      const Eigen::Index rows = stop - start;
      Matrix x(rows, features.cols());
      for (Eigen::Index i = 0; i < rows; ++i) x.row(i) = features.row(order[start + i]);
      Matrix d = softmax_rows(model.logits(x));
      for (Eigen::Index i = 0; i < rows; ++i) d(i, labels[order[start + i]]) -= 1.0;
      d /= static_cast<double>(rows);
      const Matrix g_weight = x.transpose() * d + config.weight_decay * model.weight;
      const Matrix g_bias = d.colwise().sum();
      v_weight = config.momentum * v_weight + g_weight;
      v_bias = config.momentum * v_bias + g_bias;
      model.weight -= config.learning_rate * v_weight;
      model.bias -= config.learning_rate * v_bias;
    }
  }
  require_finite(model.weight, "linear classifier weights");
  return model;
}

LinearClassifier train_frame_probe(const Dataset& train, const LinearFitConfig& config,
                                   std::uint64_t seed) {
  Eigen::Index total = 0;
  Eigen::Index dim = 0;
  for (const auto& video : train.videos) {
    total += video.frame_count();
    dim = video.features.dim();
  }
  Matrix features(total, dim);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(total));
  Eigen::Index row = 0;
  for (const auto& video : train.videos) {
    features.middleRows(row, video.frame_count()) = video.features.frames.cast<double>();
    row += video.frame_count();
    labels.insert(labels.end(), video.frame_count(), video.label);
  }
  return fit_linear_classifier(features, labels, train.class_count, config, seed);
}

int prototype_keep_count(double m_percent, int frame_count) {
  if (!(m_percent > 0.0 && m_percent <= 100.0))
    throw ConfigError("m percent must be in (0, 100]");
  const double exact = m_percent * frame_count / 100.0;
  return std::max(1, static_cast<int>(std::ceil(exact - 1e-9)));
}

Vector prototype_video_vector(const VideoRecord& video, const LinearClassifier& probe,
                              double m_percent) {
  const Matrix frames = video.features.frames.cast<double>();
  const Matrix probs = softmax_rows(probe.logits(frames));
  std::vector<int> correct;
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    if (argmax(probs.row(t).transpose()) == video.label) correct.push_back(static_cast<int>(t));
  }
  if (correct.empty()) return frames.colwise().mean().transpose();

  std::stable_sort(correct.begin(), correct.end(), [&](int a, int b) {
    return probs(a, video.label) > probs(b, video.label);
  });
  const auto keep = std::min<std::size_t>(
      correct.size(), static_cast<std::size_t>(prototype_keep_count(m_percent, video.frame_count())));
  Vector sum = Vector::Zero(frames.cols());
  for (std::size_t i = 0; i < keep; ++i) sum += frames.row(correct[i]).transpose();
  return sum / static_cast<double>(keep);
}

TsqEmbeddingSet prototype_init(const Dataset& train, int classes, const LinearClassifier& probe,
                               double m_percent) {
  Eigen::Index dim = train.videos.empty() ? 0 : train.videos.front().features.dim();
  Matrix sums = Matrix::Zero(classes, dim);
  std::vector<int> counts(classes, 0);
  for (const auto& video : train.videos) {
    if (video.label < 0 || video.label >= classes)
      throw InitError("prototype init: video " + video.id() + " has label outside [0, C)");
    sums.row(video.label) += prototype_video_vector(video, probe, m_percent).transpose();
    ++counts[video.label];
  }
  for (int c = 0; c < classes; ++c) {
    if (counts[c] == 0)
      throw InitError("prototype init: class " + std::to_string(c) + " has no training videos");
    sums.row(c) /= static_cast<double>(counts[c]);
  }
  return {std::move(sums), Modality::Visual};
}

QueryOutput vqm_forward(const Matrix& frames, const ModelParams& params) {
  const BranchForward fwd = branch_forward(params.visual, params.config, frames, "vqm");
  return {fwd.saliency(params.config.classes), fwd.logits};
}

QueryOutput vqm_forward(const VideoRecord& video, const ModelParams& params) {
  return vqm_forward(Matrix(video.features.frames.cast<double>()), params);
}

}  // namespace tsq
