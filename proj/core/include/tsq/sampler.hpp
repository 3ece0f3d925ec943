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
#include <string>
#include <vector>

#include "tsq/common.hpp"

namespace tsq {

enum class SaliencySource { Visual, Textual, Backfill };

const char* to_string(SaliencySource source);

struct SaliencyScores {
  Vector per_frame;
  SaliencySource modality = SaliencySource::Visual;
};

struct SelectionResult {
  std::vector<int> indices;  // selection order
  std::vector<SaliencySource> provenance;
};

inline constexpr int kDefaultTopClasses = 5;
inline constexpr double kDefaultVisualProportion = 0.6;

// s_i = sum over the `top_classes` most probable categories of p_c * A_{c,i},
// where p = softmax(z) restricted to those categories and renormalized.
SaliencyScores aggregate_saliency(const Matrix& attention, const Vector& logits, int top_classes,
                                  SaliencySource modality = SaliencySource::Visual);

// Number of frames taken from the visual ranking: round-half-up of
// lambda_v * K.
int visual_share(int budget, double visual_proportion);

// Union of the top round(lambda_v K) visual frames and the top K - that many
// textual frames; duplicates are backfilled from the visual ranking. Throws
// ConfigError unless lambda_v + lambda_t == 1 and 1 <= K <= T.
SelectionResult fuse_and_select(const SaliencyScores& visual, const SaliencyScores& textual,
                                int budget, double visual_proportion, double textual_proportion);

// floor(j * T / K) for j in [0, K).
std::vector<int> baseline_uniform(int frame_count, int budget);
// K distinct frames drawn without replacement, in draw order.
std::vector<int> baseline_random(int frame_count, int budget, std::uint64_t seed);
std::vector<int> baseline_dense(int frame_count);

// Per-frame max softmax confidence of `frame_logits` (T x C), top K frames.
std::vector<int> baseline_maxconf(const Matrix& frame_logits, int budget);

}  // namespace tsq
