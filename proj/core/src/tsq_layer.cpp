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

#include "tsq/tsq_layer.hpp"

#include <cmath>

namespace tsq {

Matrix Linear::forward(const Matrix& x) const {
  if (x.cols() != weight.rows())
    throw DimensionError("linear: input has " + std::to_string(x.cols()) +
                         " columns, weight expects " + std::to_string(weight.rows()));
  Matrix y = x * weight;
  y.rowwise() += bias.row(0);
  return y;
}

Matrix Linear::backward(const Matrix& x, const Matrix& d_out, Linear& grad) const {
  grad.weight.noalias() += x.transpose() * d_out;
  grad.bias += d_out.colwise().sum();
  return d_out * weight.transpose();
}

Matrix AttentionCache::saliency() const {
  if (head_attention.size() == 1) return head_attention.front();
  Matrix mean = Matrix::Zero(head_attention.front().rows(), head_attention.front().cols());
  for (const auto& a : head_attention) mean += a;
  return mean / static_cast<double>(head_attention.size());
}

AttentionCache attention_forward(const Matrix& query_input, const Matrix& frames,
                                 const AttentionParams& params, int heads,
                                 const std::string& layer_name) {
  const Eigen::Index dim = params.w_q.rows();
  if (query_input.cols() != dim || frames.cols() != dim)
    throw DimensionError(layer_name + ": queries have dim " + std::to_string(query_input.cols()) +
                         ", frames have dim " + std::to_string(frames.cols()) +
                         ", projections expect " + std::to_string(dim));
  if (heads < 1 || dim % heads != 0)
    throw DimensionError(layer_name + ": head count " + std::to_string(heads) +
                         " does not divide dim " + std::to_string(dim));
  if (frames.rows() < 1) throw DimensionError(layer_name + ": empty frame sequence");

  AttentionCache cache;
  cache.heads = heads;
  cache.query_input = query_input;
  cache.frames = frames;
  cache.queries = query_input * params.w_q;
  cache.keys = frames * params.w_k;
  cache.values = frames * params.w_v;
  cache.response.resize(query_input.rows(), dim);

  const Eigen::Index head_dim = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  for (int h = 0; h < heads; ++h) {
    const Eigen::Index col = h * head_dim;
    const Matrix logits = scale * cache.queries.middleCols(col, head_dim) *
                          cache.keys.middleCols(col, head_dim).transpose();
    Matrix attention = softmax_rows(logits);
    cache.response.middleCols(col, head_dim) = attention * cache.values.middleCols(col, head_dim);
    cache.head_attention.push_back(std::move(attention));
  }
  require_finite(cache.response, layer_name + " attention response");
  return cache;
}

AttentionBackward attention_backward(const AttentionCache& cache, const Matrix& d_response,
                                     const std::vector<Matrix>& d_attention,
                                     const Matrix& d_values_extra,
                                     const AttentionParams& params, AttentionParams& grad) {
  const Eigen::Index dim = params.w_q.rows();
  const Eigen::Index head_dim = dim / cache.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  Matrix d_queries = Matrix::Zero(cache.queries.rows(), dim);
  Matrix d_keys = Matrix::Zero(cache.keys.rows(), dim);
  Matrix d_values = Matrix::Zero(cache.values.rows(), dim);
  for (int h = 0; h < cache.heads; ++h) {
    const Eigen::Index col = h * head_dim;
    const Matrix& attention = cache.head_attention[h];
    const auto d_resp = d_response.middleCols(col, head_dim);
    Matrix d_att = d_resp * cache.values.middleCols(col, head_dim).transpose();
    if (!d_attention.empty()) d_att += d_attention[h];
    d_values.middleCols(col, head_dim) += attention.transpose() * d_resp;
    // softmax Jacobian, row-wise: dS = A .* (dA - <dA, A>)
    const Vector inner = (d_att.array() * attention.array()).rowwise().sum();
    const Matrix d_logits =
        (attention.array() * (d_att.colwise() - inner).array()).matrix() * scale;
    d_queries.middleCols(col, head_dim) += d_logits * cache.keys.middleCols(col, head_dim);
    d_keys.middleCols(col, head_dim) +=
        d_logits.transpose() * cache.queries.middleCols(col, head_dim);
  }
  if (d_values_extra.size() > 0) d_values += d_values_extra;

  grad.w_q.noalias() += cache.query_input.transpose() * d_queries;
  grad.w_k.noalias() += cache.frames.transpose() * d_keys;
  grad.w_v.noalias() += cache.frames.transpose() * d_values;

  AttentionBackward out;
  out.d_query_input = d_queries * params.w_q.transpose();
  out.d_frames = d_keys * params.w_k.transpose() + d_values * params.w_v.transpose();
  return out;
}

TsqAttentionResult tsq_attention(const Matrix& embeddings, const Matrix& frames,
                                 const AttentionParams& params, const Matrix& positional,
                                 bool use_positional) {
  Matrix keyed = frames;
  if (use_positional) {
    if (frames.rows() > positional.rows())
      throw DimensionError("tsq: " + std::to_string(frames.rows()) +
                           " frames exceed positional table of " +
                           std::to_string(positional.rows()));
    if (positional.cols() != frames.cols())
      throw DimensionError("tsq: positional table width differs from frame dim");
    keyed += positional.topRows(frames.rows());
  }
  AttentionCache cache = attention_forward(embeddings, keyed, params, 1);
  return {std::move(cache.head_attention.front()), std::move(cache.response)};
}

FfnCache ffn_forward_cached(const Matrix& input, const FfnParams& params, bool normalize,
                            const std::string& layer_name) {
  FfnCache cache;
  cache.normalize = normalize;
  cache.input = input;
  cache.hidden_pre = params.expand.forward(input);
  cache.hidden = cache.hidden_pre.cwiseMax(0.0);
  cache.summed = input + params.contract.forward(cache.hidden);
  if (cache.summed.cols() != input.cols())
    throw DimensionError(layer_name + ": output width differs from input width");
  if (normalize) {
    const Eigen::Index rows = cache.summed.rows();
    const double width = static_cast<double>(cache.summed.cols());
    cache.normalized.resize(rows, cache.summed.cols());
    cache.inv_std.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double mean = cache.summed.row(r).mean();
      const auto centered = cache.summed.row(r).array() - mean;
      const double variance = centered.square().sum() / width;
      cache.inv_std[r] = 1.0 / std::sqrt(variance + kNormEpsilon);
      cache.normalized.row(r) = centered * cache.inv_std[r];
    }
    cache.output = cache.normalized.array().rowwise() * params.norm_scale.row(0).array();
    cache.output.rowwise() += params.norm_shift.row(0);
  } else {
    cache.output = cache.summed;
  }
  require_finite(cache.output, layer_name + " output");
  return cache;
}

Matrix ffn_forward(const Matrix& input, const FfnParams& params, bool normalize) {
  return ffn_forward_cached(input, params, normalize).output;
}

Matrix ffn_backward(const FfnCache& cache, const Matrix& d_output, const FfnParams& params,
                    FfnParams& grad) {
  Matrix d_summed;
  if (cache.normalize) {
    grad.norm_scale += (d_output.array() * cache.normalized.array()).colwise().sum().matrix();
    grad.norm_shift += d_output.colwise().sum();
    const Matrix d_norm = d_output.array().rowwise() * params.norm_scale.row(0).array();
    d_summed.resize(d_norm.rows(), d_norm.cols());
    for (Eigen::Index r = 0; r < d_norm.rows(); ++r) {
      const double mean_d = d_norm.row(r).mean();
      const double mean_dn = d_norm.row(r).dot(cache.normalized.row(r)) /
                             static_cast<double>(d_norm.cols());
      d_summed.row(r) = cache.inv_std[r] * (d_norm.row(r).array() - mean_d -
                                            cache.normalized.row(r).array() * mean_dn);
    }
  } else {
    d_summed = d_output;
  }
  const Matrix d_hidden = params.contract.backward(cache.hidden, d_summed, grad.contract);
  const Matrix d_pre = (cache.hidden_pre.array() > 0.0).select(d_hidden, 0.0);
  return d_summed + params.expand.backward(cache.input, d_pre, grad.expand);
}

Vector class_specific_classify(const Matrix& responses, const ClassifierParams& params) {
  if (responses.rows() != params.weights.rows() || responses.cols() != params.weights.cols() ||
      params.biases.rows() != params.weights.rows())
    throw DimensionError("class-specific classifier: responses are " +
                         std::to_string(responses.rows()) + "x" +
                         std::to_string(responses.cols()) + ", weights are " +
                         std::to_string(params.weights.rows()) + "x" +
                         std::to_string(params.weights.cols()));
  return (responses.array() * params.weights.array()).rowwise().sum().matrix() +
         params.biases.col(0);
}

Vector class_agnostic_classify(const Matrix& responses, const ClassifierParams& params) {
  if (params.weights.rows() != 1 || params.biases.size() != 1 ||
      responses.cols() != params.weights.cols())
    throw DimensionError("class-agnostic classifier: expects one 1x" +
                         std::to_string(responses.cols()) + " projection");
  Vector z = responses * params.weights.row(0).transpose();
  z.array() += params.biases(0, 0);
  return z;
}

Matrix classifier_backward(const Matrix& responses, const Vector& d_logits,
                           const ClassifierParams& params, ClassifierParams& grad) {
  if (params.weights.rows() == 1 && responses.rows() != 1) {
    grad.weights.row(0) += d_logits.transpose() * responses;
    grad.biases(0, 0) += d_logits.sum();
    return d_logits * params.weights.row(0);
  }
  grad.weights += (responses.array().colwise() * d_logits.array()).matrix();
  grad.biases.col(0) += d_logits;
  return (params.weights.array().colwise() * d_logits.array()).matrix();
}

bool is_row_stochastic(const Matrix& attention, double tolerance) {
  for (Eigen::Index r = 0; r < attention.rows(); ++r) {
    if (std::abs(attention.row(r).sum() - 1.0) > tolerance) return false;
    for (Eigen::Index c = 0; c < attention.cols(); ++c) {
      const double a = attention(r, c);
      if (!(a > 0.0 && a <= 1.0)) return false;
    }
  }
  return true;
}

Linear zeros_like(const Linear& p) {
  return {Matrix::Zero(p.weight.rows(), p.weight.cols()),
          Matrix::Zero(p.bias.rows(), p.bias.cols())};
}

AttentionParams zeros_like(const AttentionParams& p) {
  return {Matrix::Zero(p.w_q.rows(), p.w_q.cols()), Matrix::Zero(p.w_k.rows(), p.w_k.cols()),
          Matrix::Zero(p.w_v.rows(), p.w_v.cols())};
}

FfnParams zeros_like(const FfnParams& p) {
  return {zeros_like(p.expand), zeros_like(p.contract),
          Matrix::Zero(p.norm_scale.rows(), p.norm_scale.cols()),
          Matrix::Zero(p.norm_shift.rows(), p.norm_shift.cols())};
}

ClassifierParams zeros_like(const ClassifierParams& p) {
  return {Matrix::Zero(p.weights.rows(), p.weights.cols()),
          Matrix::Zero(p.biases.rows(), p.biases.cols())};
}

}  // namespace tsq
