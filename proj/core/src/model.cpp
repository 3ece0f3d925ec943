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

#include "tsq/model.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace tsq {

void ModelConfig::validate() const {
  if (classes < 2) throw ConfigError("model: need at least 2 classes");
  if (visual_dim < 1 || text_dim < 1 || reduced_dim < 1)
    throw ConfigError("model: dimensions must be positive");
  if (max_frames < 1) throw ConfigError("model: max_frames must be positive");
  if (heads < 1 || reduced_dim % heads != 0)
    throw ConfigError("model: heads must divide the reduced dimension");
  if (layers < 1) throw ConfigError("model: need at least one TSQ layer");
  if (hidden_dim < 0) throw ConfigError("model: hidden_dim must be >= 0");
}

namespace {

const char* mode_name(bool class_specific) { return class_specific ? "cs" : "ca"; }

bool parse_mode(const std::string& text, const char* field) {
  if (text == "cs") return true;
  if (text == "ca") return false;
  throw ConfigError(std::string("model.") + field + ": expected 'cs' or 'ca', got '" + text + "'");
}

}  // namespace

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"classes", c.classes},
       {"visual_dim", c.visual_dim},
       {"text_dim", c.text_dim},
       {"reduced_dim", c.reduced_dim},
       {"hidden_dim", c.hidden_dim},
       {"max_frames", c.max_frames},
       {"heads", c.heads},
       {"layers", c.layers},
       {"self_attention", c.self_attention},
       {"positional", c.positional},
       {"normalize", c.normalize},
       {"attention", mode_name(c.attention == AttentionMode::ClassSpecific)},
       {"classifier", mode_name(c.classifier == ClassifierMode::ClassSpecific)}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.classes = j.value("classes", c.classes);
  c.visual_dim = j.value("visual_dim", c.visual_dim);
  c.text_dim = j.value("text_dim", c.text_dim);
  c.reduced_dim = j.value("reduced_dim", c.reduced_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.max_frames = j.value("max_frames", c.max_frames);
  c.heads = j.value("heads", c.heads);
  c.layers = j.value("layers", c.layers);
  c.self_attention = j.value("self_attention", c.self_attention);
  c.positional = j.value("positional", c.positional);
  c.normalize = j.value("normalize", c.normalize);
  if (j.contains("attention"))
    c.attention = parse_mode(j.at("attention").get<std::string>(), "attention")
                      ? AttentionMode::ClassSpecific
                      : AttentionMode::ClassAgnostic;
  if (j.contains("classifier"))
    c.classifier = parse_mode(j.at("classifier").get<std::string>(), "classifier")
                       ? ClassifierMode::ClassSpecific
                       : ClassifierMode::ClassAgnostic;
}

// ---------------------------------------------------------------------------
// Parameter traversal

namespace {

template <typename Branch, typename F>
void visit_branch(Branch& b, const std::string& prefix, F&& f) {
  f(prefix + "embeddings", b.embeddings);
  f(prefix + "reduce.weight", b.reduce.weight);
  f(prefix + "reduce.bias", b.reduce.bias);
  f(prefix + "embed_reduce.weight", b.embed_reduce.weight);
  f(prefix + "embed_reduce.bias", b.embed_reduce.bias);
  f(prefix + "positional", b.positional);
  if (b.self_attention.w_q.size() > 0) {
    f(prefix + "self_attention.w_q", b.self_attention.w_q);
    f(prefix + "self_attention.w_k", b.self_attention.w_k);
    f(prefix + "self_attention.w_v", b.self_attention.w_v);
  }
  for (std::size_t l = 0; l < b.layers.size(); ++l) {
    const std::string p = prefix + "layer" + std::to_string(l) + ".";
    auto& layer = b.layers[l];
    f(p + "w_q", layer.attention.w_q);
    f(p + "w_k", layer.attention.w_k);
    f(p + "w_v", layer.attention.w_v);
    f(p + "ffn.expand.weight", layer.ffn.expand.weight);
    f(p + "ffn.expand.bias", layer.ffn.expand.bias);
    f(p + "ffn.contract.weight", layer.ffn.contract.weight);
    f(p + "ffn.contract.bias", layer.ffn.contract.bias);
    f(p + "ffn.norm_scale", layer.ffn.norm_scale);
    f(p + "ffn.norm_shift", layer.ffn.norm_shift);
  }
  f(prefix + "classifier.weights", b.classifier.weights);
  f(prefix + "classifier.biases", b.classifier.biases);
}

}  // namespace

void BranchParams::visit(const std::string& prefix, const Visitor& f) {
  visit_branch(*this, prefix, f);
}

void BranchParams::visit(const std::string& prefix, const ConstVisitor& f) const {
  visit_branch(*this, prefix, f);
}

void ModelParams::visit(const BranchParams::Visitor& f) {
  visual.visit("visual.", f);
  textual.visit("textual.", f);
}

void ModelParams::visit(const BranchParams::ConstVisitor& f) const {
  visual.visit("visual.", f);
  textual.visit("textual.", f);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

BranchParams zeros_like(const BranchParams& params) {
  BranchParams out = params;
  out.visit("", [](const std::string&, Matrix& m) { m.setZero(); });
  return out;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams out = params;
  out.visit([](const std::string&, Matrix& m) { m.setZero(); });
  return out;
}

// ---------------------------------------------------------------------------
// Initialization

namespace {

Matrix near_identity(int dim, double jitter, Rng& rng) {
  return Matrix::Identity(dim, dim) + gaussian_matrix(dim, dim, jitter, rng);
}

}  // namespace

BranchParams init_branch(const ModelConfig& config, int input_dim, Rng& rng) {
  const int dr = config.reduced_dim;
  const int h = config.ffn_width();
  BranchParams b;
  b.embeddings = gaussian_matrix(config.query_count(), input_dim, 1.0, rng);
  b.reduce.weight = gaussian_matrix(input_dim, dr, 1.0 / std::sqrt(input_dim), rng);
  b.reduce.bias = Matrix::Zero(1, dr);
  b.embed_reduce = b.reduce;
  b.positional = Matrix::Zero(config.max_frames, dr);
  if (config.self_attention) {
    const double s = 1.0 / std::sqrt(dr);
    b.self_attention.w_q = gaussian_matrix(dr, dr, s, rng);
    b.self_attention.w_k = gaussian_matrix(dr, dr, s, rng);
    b.self_attention.w_v = gaussian_matrix(dr, dr, s, rng);
  }
  for (int l = 0; l < config.layers; ++l) {
    TsqLayerParams layer;
    layer.attention.w_q = near_identity(dr, 0.02, rng);
    layer.attention.w_k = near_identity(dr, 0.02, rng);
    layer.attention.w_v = near_identity(dr, 0.02, rng);
    layer.ffn.expand.weight = gaussian_matrix(dr, h, 1.0 / std::sqrt(dr), rng);
    layer.ffn.expand.bias = Matrix::Zero(1, h);
    layer.ffn.contract.weight = gaussian_matrix(h, dr, 0.5 / std::sqrt(h), rng);
    layer.ffn.contract.bias = Matrix::Zero(1, dr);
    layer.ffn.norm_scale = Matrix::Ones(1, dr);
    layer.ffn.norm_shift = Matrix::Zero(1, dr);
    b.layers.push_back(std::move(layer));
  }
  const int classifier_rows = config.shared_classifier() ? 1 : config.classes;
  b.classifier.weights = gaussian_matrix(classifier_rows, dr, 1.0 / std::sqrt(dr), rng);
  b.classifier.biases = Matrix::Zero(classifier_rows, 1);
  return b;
}

ModelParams init_model(const ModelConfig& config, Rng& rng) {
  config.validate();
  ModelParams params;
  params.config = config;
  params.visual = init_branch(config, config.visual_dim, rng);
  params.textual = init_branch(config, config.text_dim, rng);
  return params;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

Matrix broadcast_rows(const Matrix& m, int rows) {
  if (m.rows() == rows) return m;
  return m.row(0).replicate(rows, 1);
}

Vector classify(const Matrix& input, const ClassifierParams& params, const ModelConfig& config) {
  return config.shared_classifier() ? class_agnostic_classify(input, params)
                                    : class_specific_classify(input, params);
}

Matrix keyed_frames(const BranchParams& params, const ModelConfig& config, const Matrix& reduced,
                    const std::string& name) {
  if (!config.positional) return reduced;
  if (reduced.rows() > params.positional.rows())
    throw DimensionError(name + ": " + std::to_string(reduced.rows()) +
                         " frames exceed the positional table (" +
                         std::to_string(params.positional.rows()) + " rows)");
  return reduced + params.positional.topRows(reduced.rows());
}

}  // namespace

Matrix BranchForward::saliency(int classes) const {
  return broadcast_rows(last_attention().saliency(), classes);
}

BranchForward branch_forward(const BranchParams& params, const ModelConfig& config,
                             const Matrix& frames, const std::string& name) {
  if (frames.cols() != params.reduce.weight.rows())
    throw DimensionError(name + ": frame dim " + std::to_string(frames.cols()) +
                         " differs from model input dim " +
                         std::to_string(params.reduce.weight.rows()));
  BranchForward fwd;
  fwd.reduced = params.reduce.forward(frames);
  const Matrix keyed = keyed_frames(params, config, fwd.reduced, name);
  fwd.query_input = params.embed_reduce.forward(params.embeddings);
  if (config.self_attention) {
    fwd.self_cache = attention_forward(fwd.query_input, fwd.query_input, params.self_attention, 1,
                                       name + ".self_attention");
    fwd.self_output = fwd.query_input + fwd.self_cache.response;
  } else {
    fwd.self_output = fwd.query_input;
  }
  const Matrix* queries = &fwd.self_output;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const std::string layer_name = name + ".layer" + std::to_string(l);
    fwd.attention.push_back(
        attention_forward(*queries, keyed, params.layers[l].attention, config.heads, layer_name));
    fwd.ffn.push_back(ffn_forward_cached(fwd.attention.back().response, params.layers[l].ffn,
                                         config.normalize, layer_name + ".ffn"));
    queries = &fwd.ffn.back().output;
  }
  fwd.classifier_input = broadcast_rows(*queries, config.classes);
  fwd.logits = classify(fwd.classifier_input, params.classifier, config);
  return fwd;
}

HeadForward head_forward(const BranchParams& params, const ModelConfig& config,
                         const Matrix& response, const std::string& name) {
  HeadForward head;
  head.ffn = ffn_forward_cached(response, params.layers.back().ffn, config.normalize, name);
  head.classifier_input = broadcast_rows(head.ffn.output, config.classes);
  head.logits = classify(head.classifier_input, params.classifier, config);
  return head;
}

namespace {

// dL/d(last FFN output) from dL/dz, folding the broadcast back to one row.
Matrix classifier_to_ffn_output(const BranchParams& params, const Matrix& classifier_input,
                                const Vector& d_logits, Eigen::Index ffn_rows,
                                BranchParams& grad) {
  Matrix d_input = classifier_backward(classifier_input, d_logits, params.classifier,
                                       grad.classifier);
  if (ffn_rows != d_input.rows()) return d_input.colwise().sum();
  return d_input;
}

}  // namespace

Matrix head_backward(const BranchParams& params, const ModelConfig& /*config*/,
                     const HeadForward& head, const Vector& d_logits, BranchParams& grad) {
  const Matrix d_out = classifier_to_ffn_output(params, head.classifier_input, d_logits,
                                                head.ffn.output.rows(), grad);
  return ffn_backward(head.ffn, d_out, params.layers.back().ffn, grad.layers.back().ffn);
}

void branch_backward(const BranchParams& params, const ModelConfig& config, const Matrix& frames,
                     const BranchForward& fwd, const Vector& d_logits,
                     const std::vector<Matrix>& d_attention_extra,
                     const Matrix& d_values_extra, BranchParams& grad) {
  Matrix d_out = classifier_to_ffn_output(params, fwd.classifier_input, d_logits,
                                          fwd.ffn.back().output.rows(), grad);
  Matrix d_keyed = Matrix::Zero(fwd.reduced.rows(), fwd.reduced.cols());
  const std::size_t last = params.layers.size() - 1;
  static const std::vector<Matrix> kNoAttention;
  static const Matrix kNoValues;
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const Matrix d_response =
        ffn_backward(fwd.ffn[l], d_out, params.layers[l].ffn, grad.layers[l].ffn);
    const AttentionBackward back = attention_backward(
        fwd.attention[l], d_response, l == last ? d_attention_extra : kNoAttention,
        l == last ? d_values_extra : kNoValues, params.layers[l].attention,
        grad.layers[l].attention);
    d_keyed += back.d_frames;
    d_out = back.d_query_input;
  }

  Matrix d_query_input = d_out;
  if (config.self_attention) {
    const AttentionBackward back = attention_backward(fwd.self_cache, d_out, kNoAttention,
                                                      kNoValues, params.self_attention,
                                                      grad.self_attention);
    d_query_input += back.d_query_input + back.d_frames;
  }
  grad.embeddings += params.embed_reduce.backward(params.embeddings, d_query_input,
                                                  grad.embed_reduce);

  if (config.positional) grad.positional.topRows(d_keyed.rows()) += d_keyed;
  params.reduce.backward(frames, d_keyed, grad.reduce);
}

}  // namespace tsq
