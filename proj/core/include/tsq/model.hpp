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

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tsq/common.hpp"
#include "tsq/tsq_layer.hpp"

namespace tsq {

// Class-specific attention uses one query per category; class-agnostic uses
// a single shared query whose attention row is broadcast to every category.
enum class AttentionMode { ClassSpecific, ClassAgnostic };

// Class-specific: one projection per category. Class-agnostic: with
// class-specific attention, one shared 1 x d' projection applied to every
// row; with class-agnostic attention, an ordinary d' -> C fully connected
// layer on the single response (stored as per-class rows).
enum class ClassifierMode { ClassSpecific, ClassAgnostic };

struct ModelConfig {
  int classes = 10;
  int visual_dim = 32;    // d
  int text_dim = 16;      // D
  int reduced_dim = 64;   // d'
  int hidden_dim = 0;     // FFN width; 0 means 4 * d'
  int max_frames = 64;    // rows of the positional table
  int heads = 1;
  int layers = 1;
  bool self_attention = false;
  bool positional = true;
  bool normalize = true;
  AttentionMode attention = AttentionMode::ClassSpecific;
  ClassifierMode classifier = ClassifierMode::ClassSpecific;

  void validate() const;
  int query_count() const { return attention == AttentionMode::ClassSpecific ? classes : 1; }
  int ffn_width() const { return hidden_dim > 0 ? hidden_dim : 4 * reduced_dim; }
  bool shared_classifier() const {
    return attention == AttentionMode::ClassSpecific &&
           classifier == ClassifierMode::ClassAgnostic;
  }
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

struct TsqLayerParams {
  AttentionParams attention;
  FfnParams ffn;
};

// One query module (visual or textual): dimension reduction, TSQ embeddings,
// positional table, TSQ layer stack and classifier.
struct BranchParams {
  Matrix embeddings;     // queries x input dim
  Linear reduce;         // frames: input dim -> d'
  Linear embed_reduce;   // embeddings: input dim -> d'
  Matrix positional;     // max_frames x d'
  AttentionParams self_attention;  // empty unless enabled
  std::vector<TsqLayerParams> layers;
  ClassifierParams classifier;

  using Visitor = std::function<void(const std::string&, Matrix&)>;
  using ConstVisitor = std::function<void(const std::string&, const Matrix&)>;
  // Visits every tensor in a fixed order with dotted names ("reduce.weight").
  void visit(const std::string& prefix, const Visitor& f);
  void visit(const std::string& prefix, const ConstVisitor& f) const;
};

struct ModelParams {
  ModelConfig config;
  BranchParams visual;
  BranchParams textual;

  void visit(const BranchParams::Visitor& f);
  void visit(const BranchParams::ConstVisitor& f) const;
  std::size_t parameter_count() const;
};

ModelParams zeros_like(const ModelParams& params);
BranchParams zeros_like(const BranchParams& params);

// Random initialization of everything except the TSQ embeddings, which are
// drawn from a scaled Gaussian here and normally overwritten by prototype or
// word-embedding initialization. Projections start near identity, the
// embedding reduction starts as a copy of the frame reduction, and the
// positional table starts at zero.
ModelParams init_model(const ModelConfig& config, Rng& rng);
BranchParams init_branch(const ModelConfig& config, int input_dim, Rng& rng);

// Forward state of one branch over one video.
struct BranchForward {
  Matrix reduced;         // X^ : T x d'
  Matrix query_input;     // reduced embeddings: queries x d'
  AttentionCache self_cache;
  Matrix self_output;     // queries after the optional self-attention block
  std::vector<AttentionCache> attention;  // per layer
  std::vector<FfnCache> ffn;              // per layer
  Matrix classifier_input;  // C x d' (broadcast for class-agnostic attention)
  Vector logits;            // z

  const AttentionCache& last_attention() const { return attention.back(); }
  // C x T saliency (row-broadcast for class-agnostic attention).
  Matrix saliency(int classes) const;
  // Value sequence of the last layer, the sequence the swap path gathers.
  const Matrix& values() const { return attention.back().values; }
};

BranchForward branch_forward(const BranchParams& params, const ModelConfig& config,
                             const Matrix& frames, const std::string& name = "branch");

// FFN + classifier applied to an externally produced response (the swap
// paths run through the last layer's head).
struct HeadForward {
  FfnCache ffn;
  Matrix classifier_input;
  Vector logits;
};

HeadForward head_forward(const BranchParams& params, const ModelConfig& config,
                         const Matrix& response, const std::string& name = "head");

// Returns dL/dresponse; accumulates head parameter gradients into `grad`.
Matrix head_backward(const BranchParams& params, const ModelConfig& config,
                     const HeadForward& head, const Vector& d_logits, BranchParams& grad);

// Backpropagates dL/dz of the main path plus any extra gradient reaching the
// last layer's attention maps (per head) and values from swap paths.
void branch_backward(const BranchParams& params, const ModelConfig& config, const Matrix& frames,
                     const BranchForward& forward, const Vector& d_logits,
                     const std::vector<Matrix>& d_attention_extra,
                     const Matrix& d_values_extra, BranchParams& grad);

}  // namespace tsq
