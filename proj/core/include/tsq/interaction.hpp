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
#include <utility>
#include <vector>

#include "tsq/common.hpp"
#include "tsq/data_model.hpp"
#include "tsq/model.hpp"

namespace tsq {

struct LossWeights {
  double alpha = 0.6;  // weight of the textual-attention / visual-feature term
  double beta = 0.6;   // weight of the visual-attention / textual-feature term

  void validate() const;
};

// Inputs of the swap-attention paths for one video.
struct BranchOutputs {
  Matrix visual_attention;   // A^v, C x T
  Matrix textual_attention;  // A^t, C x T
  Matrix visual_sequence;    // X^v, T x d'
  Matrix textual_sequence;   // X^t, T x d'
  Vector visual_logits;
  Vector textual_logits;
};

// concat_h(attention[h] * sequence[:, cols of head h]); with one head this is
// attention * sequence.
Matrix swap_gather(const std::vector<Matrix>& head_attention, const Matrix& sequence);

// (A^t X^v, A^v X^t).
std::pair<Matrix, Matrix> swap_responses(const BranchOutputs& outputs);

struct CrossEntropy {
  double loss = 0.0;
  Vector d_logits;  // softmax(z) - onehot(label)
};

CrossEntropy cross_entropy(const Vector& logits, int label);

struct LossTerms {
  double visual = 0.0;
  double textual = 0.0;
  double textual_to_visual = 0.0;
  double visual_to_textual = 0.0;
  double total = 0.0;
};

struct TotalLoss {
  LossTerms terms;
  Vector d_visual;
  Vector d_textual;
  Vector d_textual_to_visual;
  Vector d_visual_to_textual;
};

// L_v + L_t + alpha * L_{t->v} + beta * L_{v->t}, each a softmax
// cross-entropy against `label`, with dL/dz for all four logit vectors.
TotalLoss total_loss(const Vector& visual, const Vector& textual, const Vector& textual_to_visual,
                     const Vector& visual_to_textual, int label, const LossWeights& weights);

// Model inputs for one video: raw visual frames and textual frame features.
struct TrainingSample {
  std::string id;
  Matrix visual;   // T x d
  Matrix textual;  // T x D
  int label = 0;
};

TrainingSample make_training_sample(const VideoRecord& video,
                                    const WordEmbeddingTable& object_vocabulary, int top_objects);
std::vector<TrainingSample> make_training_samples(const Dataset& dataset,
                                                  const WordEmbeddingTable& object_vocabulary,
                                                  int top_objects);

struct ObjectiveResult {
  LossTerms loss;
  Vector visual_logits;
  Vector textual_logits;
};

// Full dual-branch objective for one sample. When `grad` is non-null the
// parameter gradients are accumulated into it (scaled by `grad_scale`).
// Swap responses gather the other branch's attention over this branch's value
// sequence and run through this branch's FFN and classifier; gradients flow
// into both the attention source and the gathered sequence.
ObjectiveResult evaluate_objective(const ModelParams& params, const TrainingSample& sample,
                                   const LossWeights& weights, ModelParams* grad = nullptr,
                                   double grad_scale = 1.0);

}  // namespace tsq
