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
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tsq {

// Model math runs in double precision; payloads on disk are f32.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Row-major float storage for data read from / written to payload files.
using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed manifest, payload or checkpoint.
class FormatError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Non-finite value or divergence (CLI exit code 2).
class NumericError : public Error {
 public:
  using Error::Error;
};

class InitError : public Error {
 public:
  using Error::Error;
};

// Numerically stable softmax of one vector (max subtraction).
Vector softmax(const Vector& logits);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

double log_sum_exp(const Vector& logits);

// Indices of the k largest values, ordered by descending value; ties go to
// the lower index.
std::vector<int> top_k_indices(std::span<const double> values, int k);
std::vector<int> top_k_indices(const Vector& values, int k);

// Index of the maximum entry, lowest index on ties.
int argmax(const Vector& values);

bool all_finite(const Matrix& m);

// Throws NumericError naming `what` if `m` holds NaN or infinity.
void require_finite(const Matrix& m, const std::string& what);

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng);

}  // namespace tsq
