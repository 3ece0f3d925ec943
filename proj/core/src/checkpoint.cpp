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

#include "tsq/checkpoint.hpp"

#include <map>

#include "tsq/data_model.hpp"

namespace tsq {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kCheckpointFormat = "tsq-checkpoint";

void append_tensor(std::vector<char>& payload, json& table, const std::string& name,
                   const Matrix& m) {
  const FloatMatrix rows = m.cast<float>();
  table.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()},
                   {"offset", payload.size()}});
  append_f32(payload, std::span<const float>(rows.data(), static_cast<std::size_t>(rows.size())));
}

}  // namespace

ModelParams model_skeleton(const ModelConfig& config) {
  Rng rng(0);
  return zeros_like(init_model(config, rng));
}

void write_checkpoint(const Checkpoint& checkpoint, const fs::path& manifest) {
  const fs::path payload_path = payload_path_for(manifest);
  std::vector<char> payload;
  json tensors = json::array();
  checkpoint.model.visit([&](const std::string& name, const Matrix& m) {
    append_tensor(payload, tensors, name, m);
  });
  if (checkpoint.probe) {
    append_tensor(payload, tensors, "probe.weight", checkpoint.probe->weight);
    append_tensor(payload, tensors, "probe.bias", checkpoint.probe->bias);
  }
  if (checkpoint.recognizer) {
    append_tensor(payload, tensors, "recognizer.weight", checkpoint.recognizer->weight);
    append_tensor(payload, tensors, "recognizer.bias", checkpoint.recognizer->bias);
  }
  json header = {{"format", kCheckpointFormat},
                 {"version", 1},
                 {"payload", payload_path.filename().string()},
                 {"model", checkpoint.model.config},
                 {"tensors", tensors},
                 {"run_config", checkpoint.run_config}};
  const std::string text = header.dump(2) + "\n";
  write_file_bytes(manifest, std::span<const char>(text.data(), text.size()));
  write_file_bytes(payload_path, payload);
}

Checkpoint read_checkpoint(const fs::path& manifest) {
  const std::vector<char> bytes = read_file_bytes(manifest);
  json header;
  try {
    header = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError("malformed checkpoint manifest: " + std::string(e.what()));
  }
  if (!header.is_object() || header.value("format", "") != kCheckpointFormat)
    throw FormatError("malformed checkpoint manifest: not a tsq-checkpoint file");
  Checkpoint out;
  try {
    out.model = model_skeleton(header.at("model").get<ModelConfig>());
    out.model.config = header.at("model").get<ModelConfig>();
    out.run_config = header.value("run_config", json::object());
  } catch (const json::exception& e) {
    throw FormatError("checkpoint manifest: " + std::string(e.what()));
  }
  const std::vector<char> payload =
      read_file_bytes(manifest.parent_path() / header.at("payload").get<std::string>());

  std::map<std::string, Matrix> loaded;
  std::size_t expected_offset = 0;
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto rows = entry.at("rows").get<Eigen::Index>();
    const auto cols = entry.at("cols").get<Eigen::Index>();
    const auto offset = entry.at("offset").get<std::size_t>();
    const std::size_t size = static_cast<std::size_t>(rows * cols) * 4;
    if (offset != expected_offset || offset + size > payload.size())
      throw FormatError("checkpoint: tensor " + name + " does not match the payload layout");
    FloatMatrix m(rows, cols);
    read_f32(std::span<const char>(payload.data() + offset, size),
             std::span<float>(m.data(), static_cast<std::size_t>(m.size())));
    if (!m.allFinite()) throw FormatError("checkpoint: non-finite values in " + name);
    loaded[name] = m.cast<double>();
    expected_offset = offset + size;
  }
  if (expected_offset != payload.size())
    throw FormatError("checkpoint: payload has trailing bytes");

  out.model.visit([&](const std::string& name, Matrix& m) {
    auto it = loaded.find(name);
    if (it == loaded.end()) throw FormatError("checkpoint: missing tensor " + name);
    if (it->second.rows() != m.rows() || it->second.cols() != m.cols())
      throw FormatError("checkpoint: tensor " + name + " has shape " +
                        std::to_string(it->second.rows()) + "x" +
                        std::to_string(it->second.cols()) + ", expected " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    m = it->second;
  });
  auto take_classifier = [&](const std::string& prefix) -> std::optional<LinearClassifier> {
    auto w = loaded.find(prefix + ".weight");
    auto b = loaded.find(prefix + ".bias");
    if (w == loaded.end() || b == loaded.end()) return std::nullopt;
    return LinearClassifier{w->second, b->second};
  };
  out.probe = take_classifier("probe");
  out.recognizer = take_classifier("recognizer");
  return out;
}

}  // namespace tsq
