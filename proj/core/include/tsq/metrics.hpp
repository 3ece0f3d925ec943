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

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tsq/common.hpp"

namespace tsq {

// Giga-FLOPs decomposition of a sampling pipeline: per-frame components
// (backbones run on a number of frames) plus fixed-cost heads.
struct FlopsConfig {
  struct Component {
    std::string name;
    std::string arch;
    int resolution = 0;
    double per_frame = 0.0;  // GFLOPs per frame
    int frames = 0;
  };
  struct Head {
    std::string name;
    double flops = 0.0;  // GFLOPs
  };
  std::vector<Component> components;
  std::vector<Head> heads;

  void validate() const;
};

void to_json(nlohmann::json& j, const FlopsConfig& c);
void from_json(const nlohmann::json& j, FlopsConfig& c);

struct FlopsRow {
  std::string name;
  std::string arch;
  int resolution = 0;
  double per_frame = 0.0;
  int frames = 0;  // 0 for fixed-cost heads
  double flops = 0.0;
  double rounded = 0.0;  // two decimals, half up
};

struct FlopsBreakdown {
  std::vector<FlopsRow> rows;
  double raw_total = 0.0;      // exact sum
  double rounded_total = 0.0;  // sum of the rounded rows
};

// Round half up to `decimals` places, tolerant of binary representation
// error (20.545 -> 20.55).
double round_half_up(double value, int decimals);

FlopsBreakdown flops_total(const FlopsConfig& config);

// Fixed-width table ending in "Total ... <rounded_total>G".
void print_flops_table(std::ostream& out, const FlopsBreakdown& breakdown);

struct MapResult {
  double value = 0.0;
  std::vector<int> excluded_classes;  // classes without positives
};

// Non-interpolated mean average precision over the columns of `scores`
// (N x C); ranking ties go to the lower row index.
MapResult mean_average_precision(const Matrix& scores, const std::vector<int>& labels);

// Average precision of one ranked column against binary relevance.
double average_precision(const Vector& scores, const std::vector<bool>& relevant);

// Fraction of rows whose argmax (lowest index on ties) equals the label.
double top1_accuracy(const Matrix& scores, const std::vector<int>& labels);

// |selected ∩ planted| / |planted|; 0 planted frames gives recall 1.
double planted_recall(const std::vector<int>& selected, const std::vector<int>& planted);

}  // namespace tsq
