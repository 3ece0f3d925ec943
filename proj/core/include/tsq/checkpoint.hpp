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

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "tsq/model.hpp"
#include "tsq/vqm.hpp"

namespace tsq {

// Trained artifacts: the dual-branch model plus the frame probe and the frozen
// recognizer used by the baselines and the evaluation harness.
struct Checkpoint {
  ModelParams model;
  std::optional<LinearClassifier> probe;
  std::optional<LinearClassifier> recognizer;
  nlohmann::json run_config;  // effective configuration echo
};

// JSON manifest (model dims, toggles, tensor table with byte offsets, config
// echo) plus a flat little-endian f32 payload <stem>.bin, tensors in
// ModelParams::visit order followed by probe.* and recognizer.*; each tensor
// row-major.
void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& manifest);
Checkpoint read_checkpoint(const std::filesystem::path& manifest);

// Zero-valued parameters with the shapes `config` implies.
ModelParams model_skeleton(const ModelConfig& config);

}  // namespace tsq
