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
#include <string>

#include <nlohmann/json.hpp>

#include "tsq/data_model.hpp"
#include "tsq/model.hpp"
#include "tsq/trainer.hpp"
#include "tsq/vqm.hpp"

namespace tsq {

enum class EmbeddingInit { Prototype, Word, Random };

const char* to_string(EmbeddingInit init);
EmbeddingInit parse_embedding_init(const std::string& text);

struct SamplerConfig {
  int budget = 5;          // K
  int presample = 50;      // T
  double lambda_v = 0.6;
  double lambda_t = 0.4;
  int top_classes = 5;
  int top_objects = 10;
};

// Per-frame / per-call GFLOPs of the pipeline components.
struct CostModel {
  double visual_encoder = 0.220;
  double object_recognizer = 0.0975;
  double recognizer = 4.109;
  double vqm_head = 0.36;
  double tqm_head = 0.10;
};

// Everything one CLI run needs. Model dimensions left at 0 are filled from
// the dataset.
struct RunConfig {
  std::string dataset;
  std::string vocabulary;
  double train_fraction = 0.75;

  ModelConfig model;
  SamplerConfig sampler;
  TrainConfig train;
  LinearFitConfig probe;
  LinearFitConfig recognizer;
  CostModel costs;
  double m_percent = 30.0;
  EmbeddingInit visual_init = EmbeddingInit::Prototype;
  EmbeddingInit textual_init = EmbeddingInit::Word;
  std::uint64_t seed = 0;

  RunConfig();

  // Cross-field checks: lambda_v + lambda_t = 1, K <= T, positive dims.
  void validate() const;
  // Fills d, D, C and T_max from data when left at 0.
  void adopt_data_dims(const Dataset& dataset, const Vocabulary& vocabulary);
};

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

// Applies "key=value" style overrides (e.g. "beta", "0.4"); keys mirror the
// ablation toggles. Throws ConfigError on unknown keys or bad values.
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace tsq
