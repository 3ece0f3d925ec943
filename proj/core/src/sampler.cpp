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

#include "tsq/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tsq {

const char* to_string(SaliencySource source) {
  switch (source) {
    case SaliencySource::Visual:
      return "visual";
    case SaliencySource::Textual:
      return "textual";
    case SaliencySource::Backfill:
      return "backfill";
  }
  return "unknown";
}

SaliencyScores aggregate_saliency(const Matrix& attention, const Vector& logits, int top_classes,
                                  SaliencySource modality) {
  if (attention.rows() != logits.size())
    throw DimensionError("aggregate saliency: " + std::to_string(attention.rows()) +
                         " attention rows but " + std::to_string(logits.size()) + " logits");
  if (top_classes < 1 || top_classes > logits.size())
    throw ConfigError("aggregate saliency: top classes must be in [1, C]");
  const Vector probs = softmax(logits);
  const std::vector<int> kept = top_k_indices(probs, top_classes);
  double mass = 0.0;
  for (int c : kept) mass += probs[c];
  SaliencyScores out;
  out.modality = modality;
  out.per_frame = Vector::Zero(attention.cols());
  for (int c : kept) out.per_frame += (probs[c] / mass) * attention.row(c).transpose();
  return out;
}

int visual_share(int budget, double visual_proportion) {
  return static_cast<int>(std::floor(visual_proportion * budget + 0.5 + 1e-9));
}

namespace {

void check_budget(int frame_count, int budget) {
  if (budget < 1 || budget > frame_count)
    throw ConfigError("selection budget K=" + std::to_string(budget) + " must be in [1, T=" +
                      std::to_string(frame_count) + "]");
}

}  // namespace

SelectionResult fuse_and_select(const SaliencyScores& visual, const SaliencyScores& textual,
                                int budget, double visual_proportion, double textual_proportion) {
  if (std::abs(visual_proportion + textual_proportion - 1.0) > 1e-9 || visual_proportion < 0.0 ||
      textual_proportion < 0.0)
    throw ConfigError("fusion proportions must be non-negative and sum to 1");
  if (visual.per_frame.size() != textual.per_frame.size())
    throw DimensionError("fusion: visual and textual scores differ in length");
  const int frames = static_cast<int>(visual.per_frame.size());
  check_budget(frames, budget);

  const int from_visual = visual_share(budget, visual_proportion);
  const int from_textual = budget - from_visual;
  const std::vector<int> visual_rank = top_k_indices(visual.per_frame, frames);
  const std::vector<int> textual_rank = top_k_indices(textual.per_frame, from_textual);

  SelectionResult out;
  std::vector<char> taken(frames, 0);
  auto take = [&](int index, SaliencySource source) {
    if (taken[index]) return;
    taken[index] = 1;
    out.indices.push_back(index);
    out.provenance.push_back(source);
  };
  for (int i = 0; i < from_visual; ++i) take(visual_rank[i], SaliencySource::Visual);
  for (int index : textual_rank) take(index, SaliencySource::Textual);
  for (int i = from_visual; i < frames && static_cast<int>(out.indices.size()) < budget; ++i)
    take(visual_rank[i], SaliencySource::Backfill);
  return out;
}

std::vector<int> baseline_uniform(int frame_count, int budget) {
  check_budget(frame_count, budget);
  std::vector<int> out(budget);
  for (int j = 0; j < budget; ++j)
    out[j] = static_cast<int>(static_cast<std::int64_t>(j) * frame_count / budget);
  return out;
}

std::vector<int> baseline_random(int frame_count, int budget, std::uint64_t seed) {
  check_budget(frame_count, budget);
  Rng rng(seed);
  std::vector<int> pool(frame_count);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < budget; ++i) {
    std::uniform_int_distribution<int> pick(i, frame_count - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(budget);
  return pool;
}

std::vector<int> baseline_dense(int frame_count) {
  if (frame_count < 1) throw ConfigError("dense baseline: no frames");
  std::vector<int> out(frame_count);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<int> baseline_maxconf(const Matrix& frame_logits, int budget) {
  const int frames = static_cast<int>(frame_logits.rows());
  check_budget(frames, budget);
  const Matrix probs = softmax_rows(frame_logits);
  const Vector confidence = probs.rowwise().maxCoeff();
  return top_k_indices(confidence, budget);
}

}  // namespace tsq
