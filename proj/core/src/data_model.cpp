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

#include "tsq/data_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tsq {

namespace fs = std::filesystem;
using json = nlohmann::json;

void SelectionBudget::validate() const {
  if (presample_count < 1) throw ConfigError("presample count must be >= 1");
  if (select_count < 1 || select_count > presample_count)
    throw ConfigError("select count K must satisfy 1 <= K <= T (K=" +
                      std::to_string(select_count) + ", T=" +
                      std::to_string(presample_count) + ")");
}

void validate_record(const VideoRecord& video, int class_count) {
  const std::string& id = video.id();
  const int frames = video.features.frame_count();
  if (frames < 1) throw FormatError("record " + id + ": no frames");
  if (video.features.dim() < 1) throw FormatError("record " + id + ": feature dim is zero");
  if (video.objects.frame_count() != frames)
    throw FormatError("record " + id + ": object scores have " +
                      std::to_string(video.objects.frame_count()) + " frames, features have " +
                      std::to_string(frames));
  if (!video.features.frames.allFinite())
    throw FormatError("record " + id + ": non-finite feature values");
  if (!video.objects.scores.allFinite())
    throw FormatError("record " + id + ": non-finite object scores");
  if (video.objects.scores.size() > 0 &&
      (video.objects.scores.minCoeff() < 0.0f || video.objects.scores.maxCoeff() > 1.0f))
    throw FormatError("record " + id + ": object score outside [0,1]");
  if (video.label < 0 || video.label >= class_count)
    throw FormatError("record " + id + ": label " + std::to_string(video.label) +
                      " outside [0," + std::to_string(class_count) + ")");
  if (video.planted_salient) {
    for (int index : *video.planted_salient) {
      if (index < 0 || index >= frames)
        throw FormatError("record " + id + ": planted frame " + std::to_string(index) +
                          " outside [0," + std::to_string(frames) + ")");
    }
  }
}

std::vector<int> presample_and_pad(int raw_frame_count, int presample_count) {
  if (raw_frame_count <= 0) throw ConfigError("empty video: raw frame count is 0");
  if (presample_count < 1) throw ConfigError("presample count must be >= 1");
  std::vector<int> indices(presample_count);
  const auto raw = static_cast<std::int64_t>(raw_frame_count);
  for (int j = 0; j < presample_count; ++j) {
    if (raw_frame_count >= presample_count) {
      indices[j] = static_cast<int>(j * raw / presample_count);
    } else {
      indices[j] = j % raw_frame_count;
    }
  }
  return indices;
}

VideoRecord gather_frames(const VideoRecord& video, const std::vector<int>& indices) {
  VideoRecord out;
  out.features.video_id = video.features.video_id;
  out.label = video.label;
  const auto n = static_cast<Eigen::Index>(indices.size());
  out.features.frames.resize(n, video.features.frames.cols());
  out.objects.scores.resize(n, video.objects.scores.cols());
  for (Eigen::Index j = 0; j < n; ++j) {
    out.features.frames.row(j) = video.features.frames.row(indices[j]);
    out.objects.scores.row(j) = video.objects.scores.row(indices[j]);
  }
  if (video.planted_salient) {
    std::vector<int> planted;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::find(video.planted_salient->begin(), video.planted_salient->end(),
                    indices[j]) != video.planted_salient->end())
        planted.push_back(static_cast<int>(j));
    }
    out.planted_salient = std::move(planted);
  }
  return out;
}

void SynthConfig::validate() const {
  if (classes < 2) throw ConfigError("synthetic config: need at least 2 classes");
  if (frames < 1 || dim < 1 || objects < 1 || embed_dim < 1)
    throw ConfigError("synthetic config: frames, dim, objects and embed-dim must be >= 1");
  if (per_class < 0) throw ConfigError("synthetic config: per-class count must be >= 0");
  if (salient < 0 || salient > frames)
    throw ConfigError("synthetic config: salient frames k*=" + std::to_string(salient) +
                      " exceeds T=" + std::to_string(frames));
  if (!(noise >= 0.0) || !std::isfinite(noise))
    throw ConfigError("synthetic config: noise scale must be finite and >= 0");
  if (noise_frame_fraction < 0.0 || noise_frame_fraction > 1.0)
    throw ConfigError("synthetic config: noise frame fraction must be in [0,1]");
  if (objects_per_class < 1 || objects_per_class > objects)
    throw ConfigError("synthetic config: objects per class must be in [1, objects]");
}

namespace {

float to_float(double value) { return static_cast<float>(value); }

std::string padded(const std::string& prefix, int value, int width) {
  std::ostringstream out;
  out << prefix;
  out.width(width);
  out.fill('0');
  out << value;
  return out.str();
}

}  // namespace

SyntheticDataset generate_synthetic_dataset(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int C = config.classes;
  const int T = config.frames;
  const int d = config.dim;
  const int Co = config.objects;
  const int D = config.embed_dim;

  SyntheticDataset out;
  out.dataset.class_count = C;

  // Class directions are rounded to f32 so planted frames reproduce them exactly.
  out.class_directions.resize(C, d);
  for (int c = 0; c < C; ++c)
    for (int j = 0; j < d; ++j) out.class_directions(c, j) = to_float(normal(rng));

  std::vector<int> permutation(Co);
  for (int i = 0; i < Co; ++i) permutation[i] = i;
  std::shuffle(permutation.begin(), permutation.end(), rng);
  out.class_objects.resize(C);
  for (int c = 0; c < C; ++c) {
    for (int j = 0; j < config.objects_per_class; ++j)
      out.class_objects[c].push_back(permutation[(c * config.objects_per_class + j) % Co]);
    std::sort(out.class_objects[c].begin(), out.class_objects[c].end());
  }

  Vocabulary& vocab = out.vocabulary;
  vocab.objects.rows.resize(Co, D);
  for (int o = 0; o < Co; ++o) {
    vocab.objects.names.push_back(padded("object_", o, 3));
    for (int j = 0; j < D; ++j) vocab.objects.rows(o, j) = to_float(normal(rng));
  }
  vocab.classes.rows.resize(C, D);
  for (int c = 0; c < C; ++c) {
    vocab.classes.names.push_back(padded("class_", c, 2));
    for (int j = 0; j < D; ++j) {
      double mean = 0.0;
      for (int o : out.class_objects[c]) mean += vocab.objects.rows(o, j);
      mean /= static_cast<double>(out.class_objects[c].size());
      vocab.classes.rows(c, j) = to_float(mean + config.class_name_jitter * normal(rng));
    }
  }

  std::uniform_int_distribution<int> other_class(0, C - 2);
  for (int c = 0; c < C; ++c) {
    for (int v = 0; v < config.per_class; ++v) {
      VideoRecord video;
      video.label = c;
      video.features.video_id = padded("c", c, 2) + padded("_v", v, 4);
      video.features.frames.resize(T, d);
      video.objects.scores.resize(T, Co);

      // Partial Fisher-Yates draw of the planted positions.
      std::vector<int> positions(T);
      for (int t = 0; t < T; ++t) positions[t] = t;
      for (int i = 0; i < config.salient; ++i) {
        std::uniform_int_distribution<int> pick(i, T - 1);
        std::swap(positions[i], positions[pick(rng)]);
      }
      std::vector<int> planted(positions.begin(), positions.begin() + config.salient);
      std::sort(planted.begin(), planted.end());
      std::vector<char> is_salient(T, 0);
      for (int t : planted) is_salient[t] = 1;

      for (int t = 0; t < T; ++t) {
        int source = -1;  // class whose pattern and objects the frame shows
        if (is_salient[t]) {
          source = c;
        } else if (unit(rng) >= config.noise_frame_fraction) {
          source = other_class(rng);
          if (source >= c) ++source;
        }
        for (int j = 0; j < d; ++j) {
          const double eps = normal(rng);
          const double value = source >= 0 ? out.class_directions(source, j) + config.noise * eps
                                           : eps;
          video.features.frames(t, j) = to_float(value);
        }
        Vector logits(Co);
        for (int o = 0; o < Co; ++o) logits[o] = config.noise * normal(rng);
        if (source >= 0) {
          for (int o : out.class_objects[source]) logits[o] += config.object_boost;
        }
        const Vector probs = softmax(logits);
        for (int o = 0; o < Co; ++o) video.objects.scores(t, o) = to_float(probs[o]);
      }
      video.planted_salient = std::move(planted);
      out.dataset.videos.push_back(std::move(video));
    }
  }
  return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& dataset, double train_fraction) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw ConfigError("train fraction must be in [0,1]");
  std::vector<int> per_class(dataset.class_count, 0);
  for (const auto& video : dataset.videos) ++per_class.at(video.label);
  std::vector<int> quota(dataset.class_count);
  for (int c = 0; c < dataset.class_count; ++c)
    quota[c] = static_cast<int>(std::lround(train_fraction * per_class[c]));

  std::pair<Dataset, Dataset> out;
  out.first.class_count = out.second.class_count = dataset.class_count;
  std::vector<int> taken(dataset.class_count, 0);
  for (const auto& video : dataset.videos) {
    if (taken[video.label]++ < quota[video.label]) {
      out.first.videos.push_back(video);
    } else {
      out.second.videos.push_back(video);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary helpers

void append_f32(std::vector<char>& out, std::span<const float> values) {
  const std::size_t start = out.size();
  out.resize(start + values.size() * sizeof(float));
  char* dst = out.data() + start;
  for (float value : values) {
    auto bits = std::bit_cast<std::uint32_t>(value);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    std::memcpy(dst, &bits, sizeof(bits));
    dst += sizeof(bits);
  }
}

void read_f32(std::span<const char> bytes, std::span<float> out) {
  if (bytes.size() != out.size() * sizeof(float))
    throw FormatError("payload slice has " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(out.size() * sizeof(float)));
  const char* src = bytes.data();
  for (float& value : out) {
    std::uint32_t bits;
    std::memcpy(&bits, src, sizeof(bits));
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    value = std::bit_cast<float>(bits);
    src += sizeof(bits);
  }
}

std::vector<char> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_bytes(const fs::path& path, std::span<const char> bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path.string());
}

fs::path payload_path_for(const fs::path& manifest) {
  fs::path payload = manifest;
  payload.replace_extension(".bin");
  return payload;
}

// ---------------------------------------------------------------------------
// Dataset manifest

namespace {

constexpr const char* kDatasetFormat = "tsq-dataset";
constexpr const char* kVocabularyFormat = "tsq-vocabulary";
constexpr int kFormatVersion = 1;

std::span<const float> flat(const FloatMatrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

FloatMatrix read_block(const std::vector<char>& payload, std::int64_t offset, int rows, int cols,
                       const std::string& id, const char* what) {
  const std::int64_t bytes = static_cast<std::int64_t>(rows) * cols * 4;
  if (offset < 0 || offset + bytes > static_cast<std::int64_t>(payload.size()))
    throw FormatError("record " + id + ": dimension mismatch, " + what + " block [" +
                      std::to_string(offset) + ", " + std::to_string(offset + bytes) +
                      ") exceeds payload of " + std::to_string(payload.size()) + " bytes");
  FloatMatrix out(rows, cols);
  read_f32(std::span<const char>(payload.data() + offset, static_cast<std::size_t>(bytes)),
           std::span<float>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

template <typename T>
T field(const json& object, const char* key, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) throw FormatError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw FormatError(where + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

void write_manifest(const Dataset& dataset, const fs::path& manifest) {
  for (const auto& video : dataset.videos) validate_record(video, dataset.class_count);

  const fs::path payload_path = payload_path_for(manifest);
  std::vector<char> payload;
  std::ostringstream lines;
  json header = {{"format", kDatasetFormat},
                 {"version", kFormatVersion},
                 {"payload", payload_path.filename().string()},
                 {"classes", dataset.class_count},
                 {"videos", dataset.videos.size()}};
  lines << header.dump() << '\n';
  for (const auto& video : dataset.videos) {
    json line = {{"id", video.id()},
                 {"label", video.label},
                 {"frames", video.frame_count()},
                 {"dim", video.features.dim()},
                 {"objects", video.objects.object_count()},
                 {"features_offset", payload.size()}};
    append_f32(payload, flat(video.features.frames));
    line["objects_offset"] = payload.size();
    append_f32(payload, flat(video.objects.scores));
    if (video.planted_salient) line["planted"] = *video.planted_salient;
    lines << line.dump() << '\n';
  }
  const std::string text = lines.str();
  write_file_bytes(manifest, std::span<const char>(text.data(), text.size()));
  write_file_bytes(payload_path, payload);
}

Dataset read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw FormatError("cannot open manifest " + manifest.string());
  Dataset dataset;
  std::string line;
  if (!std::getline(in, line) || line.find_first_not_of(" \t\r") == std::string::npos) {
    return dataset;  // empty file: empty dataset
  }

  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError("malformed manifest header: " + std::string(e.what()));
  }
  const std::string where = "manifest header";
  if (!header.is_object() || header.value("format", "") != kDatasetFormat)
    throw FormatError("malformed manifest header: not a " + std::string(kDatasetFormat) + " file");
  if (field<int>(header, "version", where) != kFormatVersion)
    throw FormatError("unsupported manifest version");
  dataset.class_count = field<int>(header, "classes", where);
  const auto expected_videos = field<std::size_t>(header, "videos", where);
  fs::path payload_path = manifest.parent_path() / field<std::string>(header, "payload", where);
  const std::vector<char> payload = read_file_bytes(payload_path);

  std::int64_t cursor = 0;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("manifest line " + std::to_string(line_number) + ": " + e.what());
    }
    const std::string id = entry.value("id", "<line " + std::to_string(line_number) + ">");
    const std::string rec = "record " + id;
    VideoRecord video;
    video.features.video_id = id;
    video.label = field<int>(entry, "label", rec);
    const int frames = field<int>(entry, "frames", rec);
    const int dim = field<int>(entry, "dim", rec);
    const int objects = field<int>(entry, "objects", rec);
    const auto features_offset = field<std::int64_t>(entry, "features_offset", rec);
    const auto objects_offset = field<std::int64_t>(entry, "objects_offset", rec);
    if (frames < 1 || dim < 1 || objects < 1)
      throw FormatError(rec + ": dimensions must be positive");
    const std::int64_t feature_bytes = static_cast<std::int64_t>(frames) * dim * 4;
    const std::int64_t object_bytes = static_cast<std::int64_t>(frames) * objects * 4;
    if (features_offset != cursor || objects_offset != features_offset + feature_bytes)
      throw FormatError(rec + ": dimension mismatch between manifest (T=" +
                        std::to_string(frames) + ", d=" + std::to_string(dim) +
                        ", C_o=" + std::to_string(objects) + ") and payload offsets");
    video.features.frames = read_block(payload, features_offset, frames, dim, id, "feature");
    video.objects.scores = read_block(payload, objects_offset, frames, objects, id, "object");
    cursor = objects_offset + object_bytes;
    if (auto it = entry.find("planted"); it != entry.end())
      video.planted_salient = it->get<std::vector<int>>();
    validate_record(video, dataset.class_count);
    dataset.videos.push_back(std::move(video));
  }
  if (cursor != static_cast<std::int64_t>(payload.size()))
    throw FormatError("dimension mismatch: manifest covers " + std::to_string(cursor) +
                      " payload bytes but " + payload_path.string() + " holds " +
                      std::to_string(payload.size()));
  if (dataset.videos.size() != expected_videos)
    throw FormatError("manifest header declares " + std::to_string(expected_videos) +
                      " videos, found " + std::to_string(dataset.videos.size()));
  return dataset;
}

// ---------------------------------------------------------------------------
// Vocabulary

void write_vocabulary(const Vocabulary& vocabulary, const fs::path& manifest) {
  const int dim = vocabulary.objects.dim();
  if (vocabulary.classes.size() > 0 && vocabulary.classes.dim() != dim)
    throw DimensionError("vocabulary: object and class embeddings differ in dimension");
  if (static_cast<int>(vocabulary.objects.names.size()) != vocabulary.objects.size() ||
      static_cast<int>(vocabulary.classes.names.size()) != vocabulary.classes.size())
    throw FormatError("vocabulary: name list length differs from row count");
  const fs::path payload_path = payload_path_for(manifest);
  std::vector<char> payload;
  append_f32(payload, flat(vocabulary.objects.rows));
  append_f32(payload, flat(vocabulary.classes.rows));
  std::vector<std::string> names = vocabulary.objects.names;
  names.insert(names.end(), vocabulary.classes.names.begin(), vocabulary.classes.names.end());
  json header = {{"format", kVocabularyFormat},
                 {"version", kFormatVersion},
                 {"payload", payload_path.filename().string()},
                 {"rows", vocabulary.objects.size() + vocabulary.classes.size()},
                 {"dim", dim},
                 {"object_count", vocabulary.objects.size()},
                 {"class_count", vocabulary.classes.size()},
                 {"names", names}};
  const std::string text = header.dump(2) + "\n";
  write_file_bytes(manifest, std::span<const char>(text.data(), text.size()));
  write_file_bytes(payload_path, payload);
}

Vocabulary read_vocabulary(const fs::path& manifest) {
  const std::vector<char> bytes = read_file_bytes(manifest);
  json header;
  try {
    header = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError("malformed vocabulary header: " + std::string(e.what()));
  }
  const std::string where = "vocabulary header";
  if (!header.is_object() || header.value("format", "") != kVocabularyFormat)
    throw FormatError("malformed vocabulary header: not a " + std::string(kVocabularyFormat) +
                      " file");
  const int rows = field<int>(header, "rows", where);
  const int dim = field<int>(header, "dim", where);
  const int objects = field<int>(header, "object_count", where);
  const int classes = field<int>(header, "class_count", where);
  const auto names = field<std::vector<std::string>>(header, "names", where);
  if (objects + classes != rows || static_cast<int>(names.size()) != rows || dim < 1)
    throw FormatError("vocabulary: inconsistent row counts");
  const std::vector<char> payload =
      read_file_bytes(manifest.parent_path() / field<std::string>(header, "payload", where));
  if (payload.size() != static_cast<std::size_t>(rows) * dim * 4)
    throw FormatError("vocabulary: dimension mismatch, payload holds " +
                      std::to_string(payload.size()) + " bytes for " + std::to_string(rows) +
                      "x" + std::to_string(dim));
  Vocabulary out;
  out.objects.rows = read_block(payload, 0, objects, dim, "vocabulary", "object");
  out.classes.rows =
      read_block(payload, static_cast<std::int64_t>(objects) * dim * 4, classes, dim,
                 "vocabulary", "class");
  out.objects.names.assign(names.begin(), names.begin() + objects);
  out.classes.names.assign(names.begin() + objects, names.end());
  if (!out.objects.rows.allFinite() || !out.classes.rows.allFinite())
    throw FormatError("vocabulary: non-finite embedding values");
  return out;
}

}  // namespace tsq
