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

#include "tsq/common.hpp"
#include "tsq/data_model.hpp"
#include "tsq/model.hpp"
#include "tsq/vqm.hpp"

namespace tsq {

inline constexpr int kDefaultTopObjects = 10;

// Per frame: keep the `top_n` largest object scores (ties to the lower object
// index), renormalize them to sum 1 and return the weighted sum of their
// embedding rows. top_n >= C_o keeps every object. An all-zero row falls back
// to uniform weights over the top_n lowest-index objects.
Matrix textual_frame_features(const FloatMatrix& scores, const FloatMatrix& vocabulary,
                              int top_n = kDefaultTopObjects);
Matrix textual_frame_features(const ObjectScoreSequence& objects,
                              const WordEmbeddingTable& vocabulary,
                              int top_n = kDefaultTopObjects);

// Copies category-name embeddings into a learnable textual embedding set.
TsqEmbeddingSet textual_embedding_init(const WordEmbeddingTable& class_names, int classes);

// Seed-deterministic Gaussian rows (the random-initialization ablation).
TsqEmbeddingSet random_embedding_init(int classes, int dim, Modality modality, double scale,
                                      std::uint64_t seed);

QueryOutput tqm_forward(const VideoRecord& video, const WordEmbeddingTable& vocabulary,
                        const ModelParams& params, int top_n = kDefaultTopObjects);
QueryOutput tqm_forward(const Matrix& textual_features, const ModelParams& params);

}  // namespace tsq
