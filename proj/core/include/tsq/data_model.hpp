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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsq/common.hpp"

namespace tsq {

// T x d per-frame visual features of one video.
struct FeatureSequence {
  std::string video_id;
  FloatMatrix frames;

  int frame_count() const { return static_cast<int>(frames.rows()); }
  int dim() const { return static_cast<int>(frames.cols()); }
};

// T x C_o per-frame object probabilities.
struct ObjectScoreSequence {
  FloatMatrix scores;

  int frame_count() const { return static_cast<int>(scores.rows()); }
  int object_count() const { return static_cast<int>(scores.cols()); }
};

// One embedding row per name.
struct WordEmbeddingTable {
  std::vector<std::string> names;
  FloatMatrix rows;

  int size() const { return static_cast<int>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
};

// Object vocabulary (C_o x D) plus category-name embeddings (C x D), stored
// together in one file: object rows first, then class rows.
struct Vocabulary {
  WordEmbeddingTable objects;
  WordEmbeddingTable classes;
};

struct VideoRecord {
  FeatureSequence features;
  ObjectScoreSequence objects;
  int label = 0;
  std::optional<std::vector<int>> planted_salient;

  const std::string& id() const { return features.video_id; }
  int frame_count() const { return features.frame_count(); }
};

struct Dataset {
  int class_count = 0;
  std::vector<VideoRecord> videos;

  bool empty() const { return videos.empty(); }
  std::size_t size() const { return videos.size(); }
};

struct SelectionBudget {
  int presample_count = 50;
  int select_count = 5;

  void validate() const;
};

// Validates every type invariant of a record against `class_count`; throws
// FormatError naming the record.
void validate_record(const VideoRecord& video, int class_count);

// T frame indices into a video of `raw_frame_count` frames: uniform
// start-aligned spacing floor(j * raw / T) when raw >= T, cyclic repetition
// otherwise.
std::vector<int> presample_and_pad(int raw_frame_count, int presample_count);

// Gathers the rows named by `indices` from both feature and object sequences.
VideoRecord gather_frames(const VideoRecord& video, const std::vector<int>& indices);

struct SynthConfig {
  int classes = 10;
  int frames = 16;
  int dim = 32;
  int objects = 30;
  int embed_dim = 16;
  int per_class = 40;
  int salient = 4;
  double noise = 0.5;
  // Fraction of distractor frames that are pure noise rather than another
  // class's pattern.
  double noise_frame_fraction = 0.5;
  // Logit boost on a frame's object subset before the softmax.
  double object_boost = 4.0;
  // Objects associated with each class.
  int objects_per_class = 3;
  // Spread of a class-name embedding around the mean of its objects' rows.
  double class_name_jitter = 0.3;

  void validate() const;
};

struct SyntheticDataset {
  Dataset dataset;
  Vocabulary vocabulary;
  Matrix class_directions;                     // C x d ground-truth patterns
  std::vector<std::vector<int>> class_objects;  // object subset per class
};

// Planted-saliency benchmark; a pure function of (config, seed).
SyntheticDataset generate_synthetic_dataset(const SynthConfig& config, std::uint64_t seed);

// Deterministic per-class split: the first round(fraction * n_c) videos of
// every class (in dataset order) go to the first half.
std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double train_fraction);

// JSON-lines manifest + little-endian f32 payload. The payload lives next to
// the manifest as <stem>.bin.
void write_manifest(const Dataset& dataset, const std::filesystem::path& manifest);
Dataset read_manifest(const std::filesystem::path& manifest);

void write_vocabulary(const Vocabulary& vocabulary, const std::filesystem::path& manifest);
Vocabulary read_vocabulary(const std::filesystem::path& manifest);

// Little-endian f32 helpers shared by every payload format.
void append_f32(std::vector<char>& out, std::span<const float> values);
void read_f32(std::span<const char> bytes, std::span<float> out);
std::vector<char> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const char> bytes);

std::filesystem::path payload_path_for(const std::filesystem::path& manifest);

}  // namespace tsq
