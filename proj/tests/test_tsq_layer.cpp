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

#include <doctest.h>

#include "support.hpp"
#include "tsq/tsq_layer.hpp"

using namespace tsq;
using testing::rel_error;
using testing::to_mat;

namespace {

AttentionParams random_attention(int width, Rng& rng) {
  return {testing::randn(width, width, rng), testing::randn(width, width, rng),
          testing::randn(width, width, rng)};
}

FfnParams random_ffn(int width, int hidden, Rng& rng) {
  FfnParams p;
  p.expand = {testing::randn(width, hidden, rng), testing::randn(1, hidden, rng)};
  p.contract = {testing::randn(hidden, width, rng), testing::randn(1, width, rng)};
  p.norm_scale = testing::randn(1, width, rng);
  p.norm_shift = testing::randn(1, width, rng);
  return p;
}

oracle::FfnWeights oracle_ffn(const FfnParams& p) {
  return {to_mat(p.expand.weight),   testing::row_vec(p.expand.bias),
          to_mat(p.contract.weight), testing::row_vec(p.contract.bias),
          testing::row_vec(p.norm_scale), testing::row_vec(p.norm_shift)};
}

}  // namespace

TEST_CASE("a single frame receives all attention") {
  Rng rng(3);
  const auto params = random_attention(4, rng);
  const auto out = tsq_attention(testing::randn(5, 4, rng), testing::randn(1, 4, rng), params,
                                 Matrix(), false);
  CHECK(out.attention.rows() == 5);
  CHECK(out.attention.cols() == 1);
  for (Eigen::Index c = 0; c < 5; ++c) CHECK(out.attention(c, 0) == 1.0);
}

TEST_CASE("zero query projection gives uniform attention rows") {
  Rng rng(4);
  auto params = random_attention(3, rng);
  params.w_q.setZero();
  const auto out =
      tsq_attention(testing::randn(2, 3, rng), testing::randn(7, 3, rng), params, Matrix(), false);
  for (Eigen::Index c = 0; c < 2; ++c)
    for (Eigen::Index t = 0; t < 7; ++t) CHECK(out.attention(c, t) == doctest::Approx(1.0 / 7));
}

TEST_CASE("attention and response match the scalar oracle") {
  for (int trial = 0; trial < 25; ++trial) {
    Rng rng(100 + trial);
    const int classes = 3, frames = 4, width = 2;
    const auto params = random_attention(width, rng);
    const Matrix e = testing::randn(classes, width, rng);
    const Matrix x = testing::randn(frames, width, rng);
    const Matrix pos = testing::randn(frames + 2, width, rng);
    const bool use_pos = trial % 2 == 0;
    const auto got = tsq_attention(e, x, params, pos, use_pos);
    const oracle::Mat keyed = use_pos ? oracle::add_positional(to_mat(x), to_mat(pos)) : to_mat(x);
    const auto want = oracle::attention(to_mat(e), keyed, to_mat(params.w_q), to_mat(params.w_k),
                                        to_mat(params.w_v), 1);
    CHECK(rel_error(got.attention, want.mean_attention) <= 1e-12);
    CHECK(rel_error(got.response, want.response) <= 1e-12);
    CHECK(is_row_stochastic(got.attention));
  }
}

TEST_CASE("multi-head attention splits the query width") {
  Rng rng(8);
  const int width = 6, heads = 3;
  const auto params = random_attention(width, rng);
  const Matrix q = testing::randn(4, width, rng);
  const Matrix x = testing::randn(5, width, rng);
  const AttentionCache cache = attention_forward(q, x, params, heads);
  const auto want = oracle::attention(to_mat(q), to_mat(x), to_mat(params.w_q),
                                      to_mat(params.w_k), to_mat(params.w_v), heads);
  REQUIRE(cache.head_attention.size() == 3);
  for (int h = 0; h < heads; ++h) CHECK(rel_error(cache.head_attention[h], want.heads[h]) <= 1e-12);
  CHECK(rel_error(cache.saliency(), want.mean_attention) <= 1e-12);
  CHECK(rel_error(cache.response, want.response) <= 1e-12);
}

TEST_CASE("attention rejects head counts that do not divide the width") {
  Rng rng(9);
  const auto params = random_attention(4, rng);
  CHECK_THROWS_AS(attention_forward(testing::randn(2, 4, rng), testing::randn(3, 4, rng), params, 3),
                  DimensionError);
}

TEST_CASE("too many frames for the positional table is a dimension error") {
  Rng rng(10);
  const auto params = random_attention(2, rng);
  CHECK_THROWS_AS(tsq_attention(testing::randn(2, 2, rng), testing::randn(5, 2, rng), params,
                                Matrix::Zero(4, 2), true),
                  DimensionError);
}

TEST_CASE("ffn with zero sublayers standardizes each row") {
  FfnParams p;
  p.expand = {Matrix::Zero(4, 6), Matrix::Zero(1, 6)};
  p.contract = {Matrix::Zero(6, 4), Matrix::Zero(1, 4)};
  p.norm_scale = Matrix::Ones(1, 4);
  p.norm_shift = Matrix::Zero(1, 4);
  Matrix r(1, 4);
  r << -1.0, 1.0, -1.0, 1.0;  // zero mean, unit variance
  const Matrix out = ffn_forward(r, p);
  const double shrink = 1.0 / std::sqrt(1.0 + kNormEpsilon);
  for (int j = 0; j < 4; ++j) CHECK(out(0, j) == doctest::Approx(r(0, j) * shrink).epsilon(1e-14));
}

TEST_CASE("constant ffn rows fall back to the shift vector") {
  FfnParams p;
  p.expand = {Matrix::Zero(3, 2), Matrix::Zero(1, 2)};
  p.contract = {Matrix::Zero(2, 3), Matrix::Zero(1, 3)};
  p.norm_scale = Matrix::Ones(1, 3);
  p.norm_shift = Matrix::Zero(1, 3);
  const Matrix out = ffn_forward(Matrix::Constant(2, 3, 4.5), p);
  CHECK(out.isZero(0.0));
}

TEST_CASE("ffn matches the scalar oracle with and without normalization") {
  for (int trial = 0; trial < 25; ++trial) {
    Rng rng(200 + trial);
    const auto p = random_ffn(3, 4, rng);
    const Matrix r = testing::randn(2, 3, rng);
    const bool normalize = trial % 3 != 0;
    CHECK(rel_error(ffn_forward(r, p, normalize), oracle::ffn(to_mat(r), oracle_ffn(p), normalize)) <=
          1e-12);
  }
}

TEST_CASE("class-specific classifier examples") {
  ClassifierParams p{Matrix::Zero(3, 2), Matrix(3, 1)};
  p.biases << 7.0, -1.0, 0.0;
  Rng rng(5);
  const Vector z = class_specific_classify(testing::randn(3, 2, rng), p);
  CHECK(z[0] == 7.0);
  CHECK(z[1] == -1.0);
  CHECK(z[2] == 0.0);

  ClassifierParams ones{Matrix::Ones(3, 3), Matrix(3, 1)};
  ones.biases << 0.5, 1.5, -2.0;
  const Vector unit = class_specific_classify(Matrix::Identity(3, 3), ones);
  for (int c = 0; c < 3; ++c) CHECK(unit[c] == 1.0 + ones.biases(c, 0));
}

TEST_CASE("class-specific classifier matches the per-class loop") {
  for (int trial = 0; trial < 25; ++trial) {
    Rng rng(300 + trial);
    const ClassifierParams p{testing::randn(4, 3, rng), testing::randn(4, 1, rng)};
    const Matrix r = testing::randn(4, 3, rng);
    const auto want = oracle::class_specific(to_mat(r), to_mat(p.weights), testing::col_vec(p.biases));
    CHECK(rel_error(class_specific_classify(r, p), want) <= 1e-12);
  }
}

TEST_CASE("class-agnostic classifier examples and oracle") {
  Rng rng(6);
  const ClassifierParams flat{Matrix::Zero(1, 3), Matrix::Constant(1, 1, 5.0)};
  const Vector z = class_agnostic_classify(testing::randn(4, 3, rng), flat);
  for (int c = 0; c < 4; ++c) CHECK(z[c] == 5.0);

  const ClassifierParams p{testing::randn(1, 3, rng), testing::randn(1, 1, rng)};
  const Matrix same = Matrix::Ones(4, 1) * testing::randn(1, 3, rng);
  const Vector zs = class_agnostic_classify(same, p);
  for (int c = 1; c < 4; ++c) CHECK(zs[c] == zs[0]);

  for (int trial = 0; trial < 25; ++trial) {
    Rng r2(400 + trial);
    const ClassifierParams q{testing::randn(1, 5, r2), testing::randn(1, 1, r2)};
    const Matrix r = testing::randn(6, 5, r2);
    const auto want = oracle::class_agnostic(to_mat(r), testing::row_vec(q.weights), q.biases(0, 0));
    CHECK(rel_error(class_agnostic_classify(r, q), want) <= 1e-12);
  }
}

TEST_CASE("linear backward accumulates and returns the input gradient") {
  Rng rng(12);
  Linear layer{testing::randn(3, 2, rng), testing::randn(1, 2, rng)};
  Linear grad = zeros_like(layer);
  const Matrix x = testing::randn(4, 3, rng);
  const Matrix d_out = testing::randn(4, 2, rng);
  const Matrix dx = layer.backward(x, d_out, grad);
  CHECK((dx - d_out * layer.weight.transpose()).norm() < 1e-14);
  CHECK((grad.weight - x.transpose() * d_out).norm() < 1e-14);
  CHECK((grad.bias - d_out.colwise().sum()).norm() < 1e-14);
  layer.backward(x, d_out, grad);
  CHECK((grad.weight - 2.0 * x.transpose() * d_out).norm() < 1e-13);
}
