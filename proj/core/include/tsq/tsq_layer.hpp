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

#include <string>
#include <vector>

#include "tsq/common.hpp"

namespace tsq {

// Every learnable tensor is a dense Matrix; biases are 1 x n rows and
// per-class biases C x 1 columns, so optimizers and checkpoints can walk one
// uniform tensor type.

// y = x * weight + bias, applied row-wise. weight: in x out, bias: 1 x out.
struct Linear {
  Matrix weight;
  Matrix bias;

  Matrix forward(const Matrix& x) const;
  // Accumulates weight/bias gradients into `grad`; returns dL/dx.
  Matrix backward(const Matrix& x, const Matrix& d_out, Linear& grad) const;
};

// Query/key/value projections, all d' x d'.
struct AttentionParams {
  Matrix w_q;
  Matrix w_k;
  Matrix w_v;
};

// Position-wise feed-forward block with a residual connection and a
// post-residual per-row standardization (scale/shift are 1 x d').
struct FfnParams {
  Linear expand;    // d' -> h
  Linear contract;  // h -> d'
  Matrix norm_scale;
  Matrix norm_shift;
};

// One projection per category (weights C x d', biases C x 1), or a single
// shared projection (1 x d', 1 x 1) for the class-agnostic variant.
struct ClassifierParams {
  Matrix weights;
  Matrix biases;
};

enum class Modality { Visual, Textual };

struct TsqEmbeddingSet {
  Matrix embeddings;  // C x d
  Modality modality = Modality::Visual;
};

inline constexpr double kNormEpsilon = 1e-6;

// Intermediates of one cross-attention call, kept for the backward pass.
struct AttentionCache {
  Matrix query_input;  // C x d'
  Matrix frames;       // T x d' (positional rows already added)
  Matrix queries;      // C x d'
  Matrix keys;         // T x d'
  Matrix values;       // T x d'
  std::vector<Matrix> head_attention;  // per head, C x T
  Matrix response;     // C x d', heads concatenated along columns
  int heads = 1;

  // Mean of the per-head attention maps; for one head, the map itself.
  Matrix saliency() const;
};

// Scaled dot-product cross-attention of `query_input` rows over `frames`.
// With several heads the d' columns are split evenly and each head uses
// 1/sqrt(d'/heads) scaling; one head uses 1/sqrt(d').
AttentionCache attention_forward(const Matrix& query_input, const Matrix& frames,
                                 const AttentionParams& params, int heads,
                                 const std::string& layer_name = "tsq");

struct AttentionBackward {
  Matrix d_query_input;
  Matrix d_frames;
};

// `d_response` is dL/dR; `d_attention`, when non-empty, carries extra
// per-head dL/dA contributions (e.g. from a swap path that reuses A).
// `d_values_extra`, when non-empty, adds to dL/dV.
AttentionBackward attention_backward(const AttentionCache& cache, const Matrix& d_response,
                                     const std::vector<Matrix>& d_attention,
                                     const Matrix& d_values_extra,
                                     const AttentionParams& params, AttentionParams& grad);

struct TsqAttentionResult {
  Matrix attention;  // C x T saliency
  Matrix response;   // C x d'
};

// Single-head TSQ attention over frame features, optionally adding the first
// T rows of `positional` to the frames before the key/value projections.
TsqAttentionResult tsq_attention(const Matrix& embeddings, const Matrix& frames,
                                 const AttentionParams& params, const Matrix& positional,
                                 bool use_positional);

struct FfnCache {
  Matrix input;
  Matrix hidden_pre;
  Matrix hidden;
  Matrix summed;      // input + contract(relu(expand(input)))
  Matrix normalized;  // standardized rows, before scale/shift
  Vector inv_std;
  Matrix output;
  bool normalize = true;
};

FfnCache ffn_forward_cached(const Matrix& input, const FfnParams& params, bool normalize = true,
                            const std::string& layer_name = "ffn");
Matrix ffn_forward(const Matrix& input, const FfnParams& params, bool normalize = true);
Matrix ffn_backward(const FfnCache& cache, const Matrix& d_output, const FfnParams& params,
                    FfnParams& grad);

// z_c = weights.row(c) . responses.row(c) + biases(c).
Vector class_specific_classify(const Matrix& responses, const ClassifierParams& params);
// z_c = weights.row(0) . responses.row(c) + biases(0).
Vector class_agnostic_classify(const Matrix& responses, const ClassifierParams& params);

// Backward of either classifier (chosen by the weight row count); returns
// dL/dresponses.
Matrix classifier_backward(const Matrix& responses, const Vector& d_logits,
                           const ClassifierParams& params, ClassifierParams& grad);

// True when every row sums to 1 within `tolerance` and entries lie in (0, 1].
bool is_row_stochastic(const Matrix& attention, double tolerance = 1e-6);

// Zero-filled parameter structs of matching shape.
AttentionParams zeros_like(const AttentionParams& p);
FfnParams zeros_like(const FfnParams& p);
ClassifierParams zeros_like(const ClassifierParams& p);
Linear zeros_like(const Linear& p);

}  // namespace tsq
