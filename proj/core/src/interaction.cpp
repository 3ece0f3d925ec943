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

#include "tsq/interaction.hpp"

#include <cmath>

#include "tsq/tqm.hpp"

namespace tsq {

void LossWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw ConfigError("loss weights alpha and beta must be finite and non-negative");
}

Matrix swap_gather(const std::vector<Matrix>& head_attention, const Matrix& sequence) {
  const int heads = static_cast<int>(head_attention.size());
  if (heads < 1 || sequence.cols() % heads != 0)
    throw DimensionError("swap: head count does not divide the sequence width");
  if (head_attention.front().cols() != sequence.rows())
    throw DimensionError("swap: attention covers " +
                         std::to_string(head_attention.front().cols()) + " frames, sequence has " +
                         std::to_string(sequence.rows()));
  const Eigen::Index head_dim = sequence.cols() / heads;
  Matrix out(head_attention.front().rows(), sequence.cols());
  for (int h = 0; h < heads; ++h)
    out.middleCols(h * head_dim, head_dim) =
        head_attention[h] * sequence.middleCols(h * head_dim, head_dim);
  return out;
}

std::pair<Matrix, Matrix> swap_responses(const BranchOutputs& outputs) {
  if (outputs.visual_attention.rows() != outputs.textual_attention.rows() ||
      outputs.visual_sequence.cols() != outputs.textual_sequence.cols())
    throw DimensionError("swap: branch outputs have inconsistent shapes");
  return {swap_gather({outputs.textual_attention}, outputs.visual_sequence),
          swap_gather({outputs.visual_attention}, outputs.textual_sequence)};
}

CrossEntropy cross_entropy(const Vector& logits, int label) {
  if (label < 0 || label >= logits.size())
    throw ConfigError("cross entropy: label " + std::to_string(label) + " outside [0, " +
                      std::to_string(logits.size()) + ")");
  CrossEntropy out;
  out.loss = log_sum_exp(logits) - logits[label];
  out.d_logits = softmax(logits);
  out.d_logits[label] -= 1.0;
  return out;
}

TotalLoss total_loss(const Vector& visual, const Vector& textual, const Vector& textual_to_visual,
                     const Vector& visual_to_textual, int label, const LossWeights& weights) {
  const CrossEntropy v = cross_entropy(visual, label);
  const CrossEntropy t = cross_entropy(textual, label);
  const CrossEntropy tv = cross_entropy(textual_to_visual, label);
  const CrossEntropy vt = cross_entropy(visual_to_textual, label);
  TotalLoss out;
  out.terms = {v.loss, t.loss, tv.loss, vt.loss,
               v.loss + t.loss + weights.alpha * tv.loss + weights.beta * vt.loss};
  out.d_visual = v.d_logits;
  out.d_textual = t.d_logits;
  out.d_textual_to_visual = weights.alpha * tv.d_logits;
  out.d_visual_to_textual = weights.beta * vt.d_logits;
  return out;
}

TrainingSample make_training_sample(const VideoRecord& video,
                                    const WordEmbeddingTable& object_vocabulary,
                                    int top_objects) {
  TrainingSample sample;
  sample.id = video.id();
  sample.label = video.label;
  sample.visual = video.features.frames.cast<double>();
  sample.textual = textual_frame_features(video.objects, object_vocabulary, top_objects);
  return sample;
}

std::vector<TrainingSample> make_training_samples(const Dataset& dataset,
                                                  const WordEmbeddingTable& object_vocabulary,
                                                  int top_objects) {
  std::vector<TrainingSample> out;
  out.reserve(dataset.size());
  for (const auto& video : dataset.videos)
    out.push_back(make_training_sample(video, object_vocabulary, top_objects));
  return out;
}

namespace {

// dL/dA per head and dL/dV for a swap response R = gather(A, V).
void swap_backward(const std::vector<Matrix>& head_attention, const Matrix& sequence,
                   const Matrix& d_response, std::vector<Matrix>& d_attention,
                   Matrix& d_sequence) {
  const int heads = static_cast<int>(head_attention.size());
  const Eigen::Index head_dim = sequence.cols() / heads;
  if (d_attention.empty()) {
    for (const auto& a : head_attention) d_attention.push_back(Matrix::Zero(a.rows(), a.cols()));
  }
  if (d_sequence.size() == 0) d_sequence = Matrix::Zero(sequence.rows(), sequence.cols());
  for (int h = 0; h < heads; ++h) {
    const auto d_r = d_response.middleCols(h * head_dim, head_dim);
    d_attention[h] += d_r * sequence.middleCols(h * head_dim, head_dim).transpose();
    d_sequence.middleCols(h * head_dim, head_dim) += head_attention[h].transpose() * d_r;
  }
}

}  // namespace

ObjectiveResult evaluate_objective(const ModelParams& params, const TrainingSample& sample,
                                   const LossWeights& weights, ModelParams* grad,
                                   double grad_scale) {
  const ModelConfig& config = params.config;
  const BranchForward visual = branch_forward(params.visual, config, sample.visual, "vqm");
  const BranchForward textual = branch_forward(params.textual, config, sample.textual, "tqm");
  const auto& visual_heads = visual.last_attention().head_attention;
  const auto& textual_heads = textual.last_attention().head_attention;

  const bool with_t2v = weights.alpha != 0.0;
  const bool with_v2t = weights.beta != 0.0;
  HeadForward t2v;
  HeadForward v2t;
  if (with_t2v)
    t2v = head_forward(params.visual, config, swap_gather(textual_heads, visual.values()),
                       "vqm.swap");
  if (with_v2t)
    v2t = head_forward(params.textual, config, swap_gather(visual_heads, textual.values()),
                       "tqm.swap");

  const Vector zero = Vector::Zero(config.classes);
  TotalLoss loss = total_loss(visual.logits, textual.logits, with_t2v ? t2v.logits : zero,
                              with_v2t ? v2t.logits : zero, sample.label, weights);
  if (!with_t2v) loss.terms.textual_to_visual = 0.0;
  if (!with_v2t) loss.terms.visual_to_textual = 0.0;
  loss.terms.total = loss.terms.visual + loss.terms.textual +
                     weights.alpha * loss.terms.textual_to_visual +
                     weights.beta * loss.terms.visual_to_textual;
  if (!std::isfinite(loss.terms.total))
    throw NumericError("objective: non-finite loss for sample " + sample.id);

  ObjectiveResult result{loss.terms, visual.logits, textual.logits};
  if (grad == nullptr) return result;

  // Extra gradient reaching each branch's attention maps / value sequence via
  // the swap paths.
  std::vector<Matrix> d_visual_attention;
  std::vector<Matrix> d_textual_attention;
  Matrix d_visual_values;
  Matrix d_textual_values;
  if (with_t2v) {
    const Matrix d_r = head_backward(params.visual, config, t2v,
                                     grad_scale * loss.d_textual_to_visual, grad->visual);
    swap_backward(textual_heads, visual.values(), d_r, d_textual_attention, d_visual_values);
  }
  if (with_v2t) {
    const Matrix d_r = head_backward(params.textual, config, v2t,
                                     grad_scale * loss.d_visual_to_textual, grad->textual);
    swap_backward(visual_heads, textual.values(), d_r, d_visual_attention, d_textual_values);
  }
  branch_backward(params.visual, config, sample.visual, visual, grad_scale * loss.d_visual,
                  d_visual_attention, d_visual_values, grad->visual);
  branch_backward(params.textual, config, sample.textual, textual, grad_scale * loss.d_textual,
                  d_textual_attention, d_textual_values, grad->textual);
  return result;
}

}  // namespace tsq
