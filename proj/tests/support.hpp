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
// Helpers shared by the unit tests: conversions between Eigen storage and
// the oracle containers, seeded random fills, and error measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "oracles/scalar_oracles.hpp"
#include "tsq/common.hpp"

namespace testing {

inline oracle::Mat to_mat(const tsq::Matrix& m) {
  oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

inline oracle::Mat to_mat(const tsq::FloatMatrix& m) { return to_mat(tsq::Matrix(m.cast<double>())); }

inline oracle::Vec to_vec(const tsq::Vector& v) { return oracle::Vec(v.begin(), v.end()); }

inline oracle::Vec row_vec(const tsq::Matrix& m, Eigen::Index r = 0) {
  oracle::Vec out(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out[j] = m(r, j);
  return out;
}

inline oracle::Vec col_vec(const tsq::Matrix& m, Eigen::Index c = 0) {
  oracle::Vec out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = m(i, c);
  return out;
}

// max |a - b| / max(|a|, |b|, 1): relative for large entries, absolute near 0.
inline double rel_error(const tsq::Matrix& a, const oracle::Mat& b) {
  double worst = 0.0;
  if (a.rows() != static_cast<Eigen::Index>(b.size())) return INFINITY;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a.cols() != static_cast<Eigen::Index>(b[i].size())) return INFINITY;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double scale = std::max({std::abs(a(i, j)), std::abs(b[i][j]), 1.0});
      worst = std::max(worst, std::abs(a(i, j) - b[i][j]) / scale);
    }
  }
  return worst;
}

inline double rel_error(const tsq::Vector& a, const oracle::Vec& b) {
  return rel_error(tsq::Matrix(a), oracle::Mat([&] {
                     oracle::Mat m;
                     for (double v : b) m.push_back({v});
                     return m;
                   }()));
}

inline double rel_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

inline tsq::Matrix randn(Eigen::Index rows, Eigen::Index cols, tsq::Rng& rng,
                         double stddev = 1.0) {
  return tsq::gaussian_matrix(rows, cols, stddev, rng);
}

inline tsq::Matrix rand_uniform(Eigen::Index rows, Eigen::Index cols, tsq::Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  tsq::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline int rand_int(tsq::Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("tsq_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
