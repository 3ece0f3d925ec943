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

#include "tsq/run_config.hpp"

#include <algorithm>
#include <cmath>

namespace tsq {

using json = nlohmann::json;

const char* to_string(EmbeddingInit init) {
  switch (init) {
    case EmbeddingInit::Prototype:
      return "prototype";
    case EmbeddingInit::Word:
      return "word";
    case EmbeddingInit::Random:
      return "random";
  }
  return "unknown";
}

EmbeddingInit parse_embedding_init(const std::string& text) {
  if (text == "prototype") return EmbeddingInit::Prototype;
  if (text == "word") return EmbeddingInit::Word;
  if (text == "random") return EmbeddingInit::Random;
  throw ConfigError("unknown embedding init '" + text + "' (prototype|word|random)");
}

RunConfig::RunConfig() {
  model.classes = 0;
  model.visual_dim = 0;
  model.text_dim = 0;
  model.max_frames = 0;
  probe.epochs = 10;
  recognizer.epochs = 30;
}

void RunConfig::validate() const {
  if (std::abs(sampler.lambda_v + sampler.lambda_t - 1.0) > 1e-9)
    throw ConfigError("lambda_v + lambda_t must equal 1 (got " +
                      std::to_string(sampler.lambda_v) + " + " +
                      std::to_string(sampler.lambda_t) + ")");
  if (sampler.lambda_v < 0.0 || sampler.lambda_t < 0.0)
    throw ConfigError("fusion proportions must be non-negative");
  if (sampler.presample < 1) throw ConfigError("presample count T must be >= 1");
  if (sampler.budget < 1 || sampler.budget > sampler.presample)
    throw ConfigError("budget K must satisfy 1 <= K <= T");
  if (sampler.top_classes < 1) throw ConfigError("top classes must be >= 1");
  if (sampler.top_objects < 1) throw ConfigError("top objects must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw ConfigError("train fraction must be in (0, 1]");
  if (!(m_percent > 0.0 && m_percent <= 100.0)) throw ConfigError("m percent must be in (0, 100]");
  if (model.reduced_dim < 1) throw ConfigError("reduced dim must be positive");
  if (model.classes != 0 && sampler.top_classes > model.classes)
    throw ConfigError("top classes exceeds the number of classes");
  if (model.max_frames != 0 && model.positional && sampler.presample > model.max_frames)
    throw ConfigError("presample count exceeds the positional table (max_frames)");
  if (visual_init == EmbeddingInit::Word) throw ConfigError("visual init must be prototype|random");
  if (textual_init == EmbeddingInit::Prototype)
    throw ConfigError("textual init must be word|random");
  train.validate();
}

void RunConfig::adopt_data_dims(const Dataset& dataset, const Vocabulary& vocabulary) {
  if (model.classes == 0) model.classes = dataset.class_count;
  if (model.visual_dim == 0 && !dataset.empty())
    model.visual_dim = dataset.videos.front().features.dim();
  if (model.text_dim == 0) model.text_dim = vocabulary.objects.dim();
  if (model.max_frames == 0) model.max_frames = std::max(64, sampler.presample);
  if (model.classes != dataset.class_count)
    throw ConfigError("model classes differ from the dataset's class count");
  if (!dataset.empty() && model.visual_dim != dataset.videos.front().features.dim())
    throw ConfigError("model visual dim differs from the dataset's feature dim");
  if (model.text_dim != vocabulary.objects.dim())
    throw ConfigError("model text dim differs from the vocabulary's embedding dim");
  if (!dataset.empty() && dataset.videos.front().objects.object_count() != vocabulary.objects.size())
    throw ConfigError("dataset object count differs from the vocabulary's object rows");
}

namespace {

json fit_to_json(const LinearFitConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"weight_decay", c.weight_decay}};
}

void fit_from_json(const json& j, LinearFitConfig& c) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
}

}  // namespace

json to_json(const RunConfig& c) {
  return {{"data",
           {{"dataset", c.dataset}, {"vocabulary", c.vocabulary},
            {"train_fraction", c.train_fraction}}},
          {"model", c.model},
          {"sampler",
           {{"budget", c.sampler.budget},
            {"presample", c.sampler.presample},
            {"lambda_v", c.sampler.lambda_v},
            {"lambda_t", c.sampler.lambda_t},
            {"top_classes", c.sampler.top_classes},
            {"top_objects", c.sampler.top_objects}}},
          {"train", c.train},
          {"probe", fit_to_json(c.probe)},
          {"recognizer", fit_to_json(c.recognizer)},
          {"costs",
           {{"visual_encoder", c.costs.visual_encoder},
            {"object_recognizer", c.costs.object_recognizer},
            {"recognizer", c.costs.recognizer},
            {"vqm_head", c.costs.vqm_head},
            {"tqm_head", c.costs.tqm_head}}},
          {"init",
           {{"m_percent", c.m_percent},
            {"visual", to_string(c.visual_init)},
            {"textual", to_string(c.textual_init)}}},
          {"seed", c.seed}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  try {
    if (auto d = j.find("data"); d != j.end()) {
      c.dataset = d->value("dataset", c.dataset);
      c.vocabulary = d->value("vocabulary", c.vocabulary);
      c.train_fraction = d->value("train_fraction", c.train_fraction);
    }
    if (auto m = j.find("model"); m != j.end()) from_json(*m, c.model);
    if (auto s = j.find("sampler"); s != j.end()) {
      c.sampler.budget = s->value("budget", c.sampler.budget);
      c.sampler.presample = s->value("presample", c.sampler.presample);
      c.sampler.lambda_v = s->value("lambda_v", c.sampler.lambda_v);
      c.sampler.lambda_t = s->value("lambda_t", c.sampler.lambda_t);
      c.sampler.top_classes = s->value("top_classes", c.sampler.top_classes);
      c.sampler.top_objects = s->value("top_objects", c.sampler.top_objects);
    }
    if (auto t = j.find("train"); t != j.end()) from_json(*t, c.train);
    if (auto p = j.find("probe"); p != j.end()) fit_from_json(*p, c.probe);
    if (auto r = j.find("recognizer"); r != j.end()) fit_from_json(*r, c.recognizer);
    if (auto k = j.find("costs"); k != j.end()) {
      c.costs.visual_encoder = k->value("visual_encoder", c.costs.visual_encoder);
      c.costs.object_recognizer = k->value("object_recognizer", c.costs.object_recognizer);
      c.costs.recognizer = k->value("recognizer", c.costs.recognizer);
      c.costs.vqm_head = k->value("vqm_head", c.costs.vqm_head);
      c.costs.tqm_head = k->value("tqm_head", c.costs.tqm_head);
    }
    if (auto i = j.find("init"); i != j.end()) {
      c.m_percent = i->value("m_percent", c.m_percent);
      c.visual_init = parse_embedding_init(i->value("visual", std::string("prototype")));
      c.textual_init = parse_embedding_init(i->value("textual", std::string("word")));
    }
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("override " + key + ": '" + value + "' is not a number");
  }
}

int to_int(const std::string& key, const std::string& value) {
  const double x = to_double(key, value);
  if (x != std::floor(x)) throw ConfigError("override " + key + ": '" + value + "' is not an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw ConfigError("override " + key + ": '" + value + "' is not a boolean");
}

}  // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "alpha") {
    c.train.loss_weights.alpha = to_double(key, value);
  } else if (key == "beta") {
    c.train.loss_weights.beta = to_double(key, value);
  } else if (key == "interaction") {
    // both swap-loss weights at once
    c.train.loss_weights.alpha = c.train.loss_weights.beta = to_double(key, value);
  } else if (key == "lambda_v" || key == "lambda-v") {
    c.sampler.lambda_v = to_double(key, value);
    c.sampler.lambda_t = 1.0 - c.sampler.lambda_v;
  } else if (key == "budget") {
    c.sampler.budget = to_int(key, value);
  } else if (key == "presample") {
    c.sampler.presample = to_int(key, value);
  } else if (key == "top_classes" || key == "top-classes") {
    c.sampler.top_classes = to_int(key, value);
  } else if (key == "top_objects" || key == "top-objects") {
    c.sampler.top_objects = to_int(key, value);
  } else if (key == "m_percent" || key == "m-percent") {
    c.m_percent = to_double(key, value);
  } else if (key == "reduced_dim" || key == "reduced-dim") {
    c.model.reduced_dim = to_int(key, value);
  } else if (key == "heads") {
    c.model.heads = to_int(key, value);
  } else if (key == "layers") {
    c.model.layers = to_int(key, value);
  } else if (key == "self_attention" || key == "self-attention") {
    c.model.self_attention = to_bool(key, value);
  } else if (key == "positional") {
    c.model.positional = to_bool(key, value);
  } else if (key == "attention" || key == "classifier") {
    if (value != "cs" && value != "ca")
      throw ConfigError("override " + key + ": expected cs|ca, got '" + value + "'");
    if (key == "attention")
      c.model.attention = value == "cs" ? AttentionMode::ClassSpecific : AttentionMode::ClassAgnostic;
    else
      c.model.classifier =
          value == "cs" ? ClassifierMode::ClassSpecific : ClassifierMode::ClassAgnostic;
  } else if (key == "variant") {
    // Combined attention+classifier toggle, e.g. "cs+ca".
    const auto plus = value.find('+');
    if (plus == std::string::npos) throw ConfigError("override variant: expected e.g. cs+cs");
    apply_override(c, "attention", value.substr(0, plus));
    apply_override(c, "classifier", value.substr(plus + 1));
  } else if (key == "init") {
    if (value == "random") {
      c.visual_init = c.textual_init = EmbeddingInit::Random;
    } else if (value == "prototype" || value == "default") {
      c.visual_init = EmbeddingInit::Prototype;
      c.textual_init = EmbeddingInit::Word;
    } else {
      throw ConfigError("override init: expected default|prototype|random");
    }
  } else if (key == "visual_init") {
    c.visual_init = parse_embedding_init(value);
  } else if (key == "textual_init") {
    c.textual_init = parse_embedding_init(value);
  } else if (key == "epochs") {
    c.train.epochs = to_int(key, value);
  } else if (key == "batch") {
    c.train.batch_size = to_int(key, value);
  } else if (key == "lr") {
    c.train.base_lr = to_double(key, value);
  } else if (key == "schedule") {
    if (value != "long") throw ConfigError("override schedule: only 'long' is defined");
    TrainConfig longer = TrainConfig::long_schedule();
    longer.seed = c.train.seed;
    longer.loss_weights = c.train.loss_weights;
    c.train = longer;
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_int(key, value));
    c.train.seed = c.seed;
  } else {
    throw ConfigError("unknown override key '" + key + "'");
  }
}

}  // namespace tsq
