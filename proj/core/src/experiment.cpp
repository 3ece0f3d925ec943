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

#include "tsq/experiment.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "tsq/interaction.hpp"
#include "tsq/tqm.hpp"

namespace tsq {

namespace {

enum Stream : std::uint64_t {
  kProbeStream = 1,
  kTrainStream = 2,
  kRecognizerStream = 3,
  kInitStream = 4,
  kEmbeddingStream = 5,
  kRandomPolicyStream = 1000,
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 finalizer over (master, stream)
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const char* to_string(Policy policy) {
  switch (policy) {
    case Policy::Tsq:
      return "tsq";
    case Policy::Uniform:
      return "uniform";
    case Policy::Random:
      return "random";
    case Policy::Dense:
      return "dense";
    case Policy::MaxConf:
      return "maxconf";
    case Policy::MaxConfL:
      return "maxconf-l";
  }
  return "unknown";
}

Policy parse_policy(const std::string& text) {
  for (Policy p : all_policies())
    if (text == to_string(p)) return p;
  throw ConfigError("unknown policy '" + text +
                    "' (tsq|uniform|random|dense|maxconf|maxconf-l)");
}

std::vector<Policy> all_policies() {
  return {Policy::Tsq,   Policy::Uniform, Policy::Random,
          Policy::Dense, Policy::MaxConf, Policy::MaxConfL};
}

VideoRecord presample_video(const VideoRecord& video, int presample_count) {
  return gather_frames(video, presample_and_pad(video.frame_count(), presample_count));
}

Dataset presample_dataset(const Dataset& dataset, int presample_count) {
  Dataset out;
  out.class_count = dataset.class_count;
  out.videos.reserve(dataset.size());
  for (const auto& video : dataset.videos)
    out.videos.push_back(presample_video(video, presample_count));
  return out;
}

namespace {

Matrix collapse_to_queries(const Matrix& per_class, const ModelConfig& config) {
  if (config.attention == AttentionMode::ClassSpecific) return per_class;
  return per_class.colwise().mean();
}

}  // namespace

ModelParams initial_model(const Dataset& train, const Vocabulary& vocabulary,
                          const RunConfig& config, const LinearClassifier& probe) {
  Rng rng(derive_seed(config.seed, kInitStream));
  ModelParams params = init_model(config.model, rng);
  const int classes = config.model.classes;
  if (config.visual_init == EmbeddingInit::Prototype) {
    params.visual.embeddings = collapse_to_queries(
        prototype_init(train, classes, probe, config.m_percent).embeddings, config.model);
  } else {
    params.visual.embeddings =
        collapse_to_queries(random_embedding_init(classes, config.model.visual_dim,
                                                  Modality::Visual, 1.0,
                                                  derive_seed(config.seed, kEmbeddingStream))
                                .embeddings,
                            config.model);
  }
  if (config.textual_init == EmbeddingInit::Word) {
    params.textual.embeddings = collapse_to_queries(
        textual_embedding_init(vocabulary.classes, classes).embeddings, config.model);
  } else {
    params.textual.embeddings =
        collapse_to_queries(random_embedding_init(classes, config.model.text_dim,
                                                  Modality::Textual, 1.0,
                                                  derive_seed(config.seed, kEmbeddingStream + 1))
                                .embeddings,
                            config.model);
  }
  return params;
}

Eigen::RowVectorXd pooled_features(const VideoRecord& video, const std::vector<int>& indices) {
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(video.features.dim());
  for (int i : indices) sum += video.features.frames.row(i).cast<double>();
  return sum / static_cast<double>(indices.size());
}

LinearClassifier train_recognizer(const Dataset& train, const RunConfig& config) {
  Matrix features(static_cast<Eigen::Index>(train.size()),
                  train.empty() ? 0 : train.videos.front().features.dim());
  std::vector<int> labels;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& video = train.videos[i];
    const int budget = std::min(config.sampler.budget, video.frame_count());
    features.row(static_cast<Eigen::Index>(i)) =
        pooled_features(video, baseline_uniform(video.frame_count(), budget));
    labels.push_back(video.label);
  }
  return fit_linear_classifier(features, labels, train.class_count, config.recognizer,
                               derive_seed(config.seed, kRecognizerStream));
}

Pipeline build_pipeline(const Dataset& train, const Vocabulary& vocabulary,
                        const RunConfig& config,
                        const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  if (train.empty()) throw ConfigError("pipeline: empty training set");
  const Dataset presampled = presample_dataset(train, config.sampler.presample);
  Pipeline pipeline;
  pipeline.probe = train_frame_probe(presampled, config.probe,
                                     derive_seed(config.seed, kProbeStream));
  ModelParams model = initial_model(presampled, vocabulary, config, pipeline.probe);
  const auto samples =
      make_training_samples(presampled, vocabulary.objects, config.sampler.top_objects);
  TrainConfig train_config = config.train;
  train_config.seed = derive_seed(config.seed, kTrainStream);
  TrainResult trained = tsq::train(samples, std::move(model), train_config, on_epoch);
  pipeline.model = std::move(trained.params);
  pipeline.log = std::move(trained.log);
  pipeline.recognizer = train_recognizer(presampled, config);
  return pipeline;
}

FrameSelection select_frames(Policy policy, const VideoRecord& video,
                             const Vocabulary& vocabulary, const Pipeline& pipeline,
                             const RunConfig& config, std::size_t video_index) {
  const int frames = video.frame_count();
  const int budget = std::min(config.sampler.budget, frames);
  FrameSelection out;
  auto tag_all = [&](const char* tag) { out.provenance.assign(out.indices.size(), tag); };
  switch (policy) {
    case Policy::Tsq: {
      const TrainingSample sample =
          make_training_sample(video, vocabulary.objects, config.sampler.top_objects);
      const QueryOutput v = vqm_forward(sample.visual, pipeline.model);
      const QueryOutput t = tqm_forward(sample.textual, pipeline.model);
      const int top = std::min(config.sampler.top_classes, pipeline.model.config.classes);
      const SaliencyScores sv = aggregate_saliency(v.saliency, v.logits, top, SaliencySource::Visual);
      const SaliencyScores st =
          aggregate_saliency(t.saliency, t.logits, top, SaliencySource::Textual);
      const SelectionResult sel =
          fuse_and_select(sv, st, budget, config.sampler.lambda_v, config.sampler.lambda_t);
      out.indices = sel.indices;
      for (auto p : sel.provenance) out.provenance.push_back(to_string(p));
      out.visual_scores = sv.per_frame;
      out.textual_scores = st.per_frame;
      break;
    }
    case Policy::Uniform:
      out.indices = baseline_uniform(frames, budget);
      tag_all("uniform");
      break;
    case Policy::Random:
      out.indices = baseline_random(
          frames, budget, derive_seed(config.seed, kRandomPolicyStream + video_index));
      tag_all("random");
      break;
    case Policy::Dense:
      out.indices = baseline_dense(frames);
      tag_all("dense");
      break;
    case Policy::MaxConf:
      out.indices = baseline_maxconf(
          pipeline.recognizer.logits(Matrix(video.features.frames.cast<double>())), budget);
      tag_all("maxconf");
      break;
    case Policy::MaxConfL:
      out.indices = baseline_maxconf(
          pipeline.probe.logits(Matrix(video.features.frames.cast<double>())), budget);
      tag_all("maxconf-l");
      break;
  }
  return out;
}

FlopsConfig policy_flops(Policy policy, int presample, int budget, const CostModel& costs) {
  FlopsConfig f;
  auto component = [&](const char* name, const char* arch, double per_frame, int frames) {
    f.components.push_back({name, arch, 0, per_frame, frames});
  };
  switch (policy) {
    case Policy::Tsq:
      component("Vis.Enc.", "probe", costs.visual_encoder, presample);
      component("Obj.Rec.", "objects", costs.object_recognizer, presample);
      component("Rec.Net.", "linear", costs.recognizer, budget);
      f.heads.push_back({"VQM", costs.vqm_head});
      f.heads.push_back({"TQM", costs.tqm_head});
      break;
    case Policy::Uniform:
    case Policy::Random:
      component("Rec.Net.", "linear", costs.recognizer, budget);
      break;
    case Policy::Dense:
    case Policy::MaxConf:
      component("Rec.Net.", "linear", costs.recognizer, presample);
      break;
    case Policy::MaxConfL:
      component("Vis.Enc.", "probe", costs.visual_encoder, presample);
      component("Rec.Net.", "linear", costs.recognizer, budget);
      break;
  }
  return f;
}

void to_json(nlohmann::json& j, const PolicyRow& row) {
  j = {{"policy", row.policy}, {"budget", row.budget}, {"gflops", row.gflops},
       {"map", row.map},       {"top1", row.top1}};
  if (row.recall >= 0.0) j["planted_recall"] = row.recall;
}

PolicyRow evaluate_policy(Policy policy, const Dataset& test, const Vocabulary& vocabulary,
                          const Pipeline& pipeline, const RunConfig& config) {
  if (test.empty()) throw ConfigError("evaluation: empty test set");
  const int presample = config.sampler.presample;
  Matrix scores(static_cast<Eigen::Index>(test.size()), test.class_count);
  std::vector<int> labels;
  double recall_sum = 0.0;
  int recall_count = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const VideoRecord& raw = test.videos[i];
    const std::vector<int> positions = presample_and_pad(raw.frame_count(), presample);
    const VideoRecord video = gather_frames(raw, positions);
    const FrameSelection sel = select_frames(policy, video, vocabulary, pipeline, config, i);
    scores.row(static_cast<Eigen::Index>(i)) =
        softmax(pipeline.recognizer.logits(pooled_features(video, sel.indices))).transpose();
    labels.push_back(raw.label);
    if (raw.planted_salient) {
      std::set<int> raw_selected;
      for (int p : sel.indices) raw_selected.insert(positions[p]);
      recall_sum += planted_recall(std::vector<int>(raw_selected.begin(), raw_selected.end()),
                                   *raw.planted_salient);
      ++recall_count;
    }
  }
  const int budget = policy == Policy::Dense ? presample : std::min(config.sampler.budget, presample);
  PolicyRow row;
  row.policy = to_string(policy);
  row.budget = budget;
  row.gflops = flops_total(policy_flops(policy, presample, budget, config.costs)).raw_total;
  row.map = mean_average_precision(scores, labels).value;
  row.top1 = top1_accuracy(scores, labels);
  if (recall_count > 0) row.recall = recall_sum / recall_count;
  return row;
}

EvalReport compare_policies(const Dataset& test, const Vocabulary& vocabulary,
                            const std::vector<Policy>& policies, const Pipeline& pipeline,
                            const RunConfig& config) {
  EvalReport report;
  for (Policy p : policies)
    report.rows.push_back(evaluate_policy(p, test, vocabulary, pipeline, config));
  return report;
}

CoarseScores coarse_prediction_map(const Dataset& test, const Vocabulary& vocabulary,
                                   const Pipeline& pipeline, const RunConfig& config) {
  Matrix visual(static_cast<Eigen::Index>(test.size()), test.class_count);
  Matrix textual(static_cast<Eigen::Index>(test.size()), test.class_count);
  std::vector<int> labels;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const VideoRecord video = presample_video(test.videos[i], config.sampler.presample);
    const TrainingSample sample =
        make_training_sample(video, vocabulary.objects, config.sampler.top_objects);
    visual.row(static_cast<Eigen::Index>(i)) =
        softmax(vqm_forward(sample.visual, pipeline.model).logits).transpose();
    textual.row(static_cast<Eigen::Index>(i)) =
        softmax(tqm_forward(sample.textual, pipeline.model).logits).transpose();
    labels.push_back(video.label);
  }
  return {mean_average_precision(visual, labels).value,
          mean_average_precision(textual, labels).value};
}

void to_json(nlohmann::json& j, const AblationResult& row) {
  j = {{"label", row.label},         {"fused_map", row.fused_map},
       {"visual_map", row.visual_map}, {"textual_map", row.textual_map},
       {"top1", row.top1},           {"final_loss", row.final_loss}};
  if (row.recall >= 0.0) j["planted_recall"] = row.recall;
}

AblationResult run_ablation_case(const Dataset& train, const Dataset& test,
                                 const Vocabulary& vocabulary, const RunConfig& config,
                                 const std::string& label) {
  const Pipeline pipeline = build_pipeline(train, vocabulary, config);
  AblationResult out;
  out.label = label;
  const PolicyRow fused = evaluate_policy(Policy::Tsq, test, vocabulary, pipeline, config);
  out.fused_map = fused.map;
  out.top1 = fused.top1;
  out.recall = fused.recall;
  RunConfig single = config;
  single.sampler.lambda_v = 1.0;
  single.sampler.lambda_t = 0.0;
  out.visual_map = evaluate_policy(Policy::Tsq, test, vocabulary, pipeline, single).map;
  single.sampler.lambda_v = 0.0;
  single.sampler.lambda_t = 1.0;
  out.textual_map = evaluate_policy(Policy::Tsq, test, vocabulary, pipeline, single).map;
  out.final_loss = pipeline.log.empty() ? 0.0 : pipeline.log.back().loss;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

AblationResult median_over_seeds(const Dataset& train, const Dataset& test,
                                 const Vocabulary& vocabulary, RunConfig config,
                                 const std::string& label,
                                 const std::vector<std::uint64_t>& seeds) {
  std::vector<double> fused, visual, textual, top1, recall, loss;
  for (std::uint64_t seed : seeds) {
    config.seed = seed;
    const AblationResult r = run_ablation_case(train, test, vocabulary, config, label);
    fused.push_back(r.fused_map);
    visual.push_back(r.visual_map);
    textual.push_back(r.textual_map);
    top1.push_back(r.top1);
    recall.push_back(r.recall);
    loss.push_back(r.final_loss);
  }
  return {label,        median(fused),  median(visual), median(textual),
          median(top1), median(recall), median(loss)};
}

std::pair<std::string, std::vector<std::string>> parse_grid(const std::string& grid) {
  const auto eq = grid.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= grid.size())
    throw ConfigError("grid must look like key=v1,v2,...");
  std::pair<std::string, std::vector<std::string>> out;
  out.first = grid.substr(0, eq);
  std::string rest = grid.substr(eq + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item =
        rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) throw ConfigError("grid has an empty value");
    out.second.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace tsq
