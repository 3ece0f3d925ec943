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

#include "tsq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tsq {

void FlopsConfig::validate() const {
  for (const auto& c : components) {
    if (!(c.per_frame >= 0.0) || c.frames < 0)
      throw ConfigError("flops: component '" + c.name + "' has a negative cost or frame count");
  }
  for (const auto& h : heads) {
    if (!(h.flops >= 0.0)) throw ConfigError("flops: head '" + h.name + "' has a negative cost");
  }
}

void to_json(nlohmann::json& j, const FlopsConfig& c) {
  j = {{"components", nlohmann::json::array()}, {"heads", nlohmann::json::array()}};
  for (const auto& comp : c.components)
    j["components"].push_back({{"name", comp.name},
                               {"arch", comp.arch},
                               {"resolution", comp.resolution},
                               {"flops_per_frame", comp.per_frame},
                               {"frames", comp.frames}});
  for (const auto& h : c.heads) j["heads"].push_back({{"name", h.name}, {"flops", h.flops}});
}

void from_json(const nlohmann::json& j, FlopsConfig& c) {
  c = FlopsConfig{};
  for (const auto& comp : j.value("components", nlohmann::json::array())) {
    FlopsConfig::Component x;
    x.name = comp.at("name").get<std::string>();
    x.arch = comp.value("arch", std::string("-"));
    x.resolution = comp.value("resolution", 0);
    x.per_frame = comp.at("flops_per_frame").get<double>();
    x.frames = comp.at("frames").get<int>();
    c.components.push_back(std::move(x));
  }
  for (const auto& h : j.value("heads", nlohmann::json::array()))
    c.heads.push_back({h.at("name").get<std::string>(), h.at("flops").get<double>()});
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

FlopsBreakdown flops_total(const FlopsConfig& config) {
  config.validate();
  FlopsBreakdown out;
  for (const auto& c : config.components) {
    FlopsRow row{c.name, c.arch, c.resolution, c.per_frame, c.frames, c.per_frame * c.frames, 0.0};
    row.rounded = round_half_up(row.flops, 2);
    out.rows.push_back(std::move(row));
  }
  for (const auto& h : config.heads) {
    FlopsRow row{h.name, "-", 0, 0.0, 0, h.flops, round_half_up(h.flops, 2)};
    out.rows.push_back(std::move(row));
  }
  for (const auto& row : out.rows) {
    out.raw_total += row.flops;
    out.rounded_total += row.rounded;
  }
  out.rounded_total = round_half_up(out.rounded_total, 2);
  return out;
}

void print_flops_table(std::ostream& out, const FlopsBreakdown& breakdown) {
  const auto flags = out.flags();
  out << std::left << std::setw(10) << "Module" << std::setw(8) << "Arch." << std::setw(6)
      << "Res." << std::setw(10) << "FLOPs/F" << std::setw(5) << "#F"
      << "FLOPs\n";
  out << std::fixed;
  for (const auto& row : breakdown.rows) {
    out << std::left << std::setw(10) << row.name << std::setw(8) << row.arch;
    if (row.frames > 0) {
      std::ostringstream per_frame;
      per_frame << std::fixed << std::setprecision(3) << round_half_up(row.per_frame, 3) << "G";
      out << std::setw(6) << row.resolution << std::setw(10) << per_frame.str() << std::setw(5)
          << row.frames;
    } else {
      out << std::setw(6) << "-" << std::setw(10) << "-" << std::setw(5) << "-";
    }
    out << std::setprecision(2) << row.rounded << "G\n";
  }
  out << "Total " << std::setprecision(2) << breakdown.rounded_total << "G\n";
  out.flags(flags);
}

double average_precision(const Vector& scores, const std::vector<bool>& relevant) {
  const auto n = static_cast<std::size_t>(scores.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    if (relevant[order[rank]]) {
      hits += 1.0;
      sum += hits / static_cast<double>(rank + 1);
    }
  }
  return hits > 0.0 ? sum / hits : 0.0;
}

MapResult mean_average_precision(const Matrix& scores, const std::vector<int>& labels) {
  if (scores.rows() < 1) throw ConfigError("mAP: need at least one row");
  if (static_cast<std::size_t>(scores.rows()) != labels.size())
    throw DimensionError("mAP: score rows and labels differ in count");
  MapResult out;
  double sum = 0.0;
  int counted = 0;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    std::vector<bool> relevant(labels.size());
    bool any = false;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      relevant[i] = labels[i] == c;
      any = any || relevant[i];
    }
    if (!any) {
      out.excluded_classes.push_back(static_cast<int>(c));
      continue;
    }
    sum += average_precision(scores.col(c), relevant);
    ++counted;
  }
  out.value = counted > 0 ? sum / counted : 0.0;
  return out;
}

double top1_accuracy(const Matrix& scores, const std::vector<int>& labels) {
  if (static_cast<std::size_t>(scores.rows()) != labels.size())
    throw DimensionError("top1: score rows and labels differ in count");
  if (labels.empty()) return 0.0;
  int correct = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i)
    correct += argmax(scores.row(i).transpose()) == labels[static_cast<std::size_t>(i)];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double planted_recall(const std::vector<int>& selected, const std::vector<int>& planted) {
  if (planted.empty()) return 1.0;
  int found = 0;
  for (int p : planted) found += std::find(selected.begin(), selected.end(), p) != selected.end();
  return static_cast<double>(found) / static_cast<double>(planted.size());
}

}  // namespace tsq
