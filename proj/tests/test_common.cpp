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

#include <limits>

#include "support.hpp"

using namespace tsq;

TEST_CASE("softmax is shift invariant and sums to one") {
  Vector z(4);
  z << 1.0, -2.0, 0.5, 3.0;
  const Vector p = softmax(z);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
  const Vector shifted = softmax((z.array() + 1000.0).matrix());
  CHECK((p - shifted).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(testing::rel_error(p, oracle::softmax(testing::to_vec(z))) < 1e-15);
}

TEST_CASE("softmax survives large logits") {
  Vector z(3);
  z << 1e308, 1e308, -1e308;
  const Vector p = softmax(z);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[2] == 0.0);
}

TEST_CASE("log-sum-exp agrees with the naive formula on small inputs") {
  Vector z(3);
  z << 0.1, 0.2, -0.3;
  CHECK(log_sum_exp(z) == doctest::Approx(std::log(std::exp(0.1) + std::exp(0.2) + std::exp(-0.3))));
}

TEST_CASE("top-k breaks ties toward the lower index") {
  const std::vector<double> v{0.5, 0.9, 0.5, 0.9, 0.1};
  CHECK(top_k_indices(v, 4) == std::vector<int>{1, 3, 0, 2});
  CHECK(argmax(Vector::Zero(5)) == 0);
  CHECK(top_k_indices(v, 9).size() == 5);  // k is clamped to the length
}

TEST_CASE("non-finite values are reported by name") {
  Matrix m = Matrix::Zero(2, 2);
  CHECK(all_finite(m));
  m(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(all_finite(m));
  try {
    require_finite(m, "visual.layer0.w_q");
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("visual.layer0.w_q") != std::string::npos);
  }
}

TEST_CASE("gaussian fill is seed deterministic") {
  Rng a(42), b(42);
  CHECK(gaussian_matrix(3, 4, 1.0, a) == gaussian_matrix(3, 4, 1.0, b));
  Rng c(1);
  CHECK(gaussian_matrix(2, 2, 0.0, c).isZero(0.0));
}
