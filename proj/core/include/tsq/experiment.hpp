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
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tsq/data_model.hpp"
#include "tsq/metrics.hpp"
#include "tsq/model.hpp"
#include "tsq/run_config.hpp"
#include "tsq/sampler.hpp"
#include "tsq/trainer.hpp"
#include "tsq/vqm.hpp"

namespace tsq {

// Sub-seed for one consumer of the run's single master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

enum class Policy { Tsq, Uniform, Random, Dense, MaxConf, MaxConfL };

const char* to_string(Policy policy);
Policy parse_policy(const std::string& text);
std::vector<Policy> all_policies();

// Trained sampler plus the frame probe and the frozen recognizer.
struct Pipeline {
  ModelParams model;
  LinearClassifier probe;
  LinearClassifier recognizer;
  std::vector<EpochLog> log;
};

// Uniform pre-sampling (with cyclic padding) of a raw video to T frames.
VideoRecord presample_video(const VideoRecord& video, int presample_count);
Dataset presample_dataset(const Dataset& dataset, int presample_count);

// Initial sampler parameters: random init from the run seed, then visual
// prototypes (from `probe`) and category-name embeddings unless the config
// asks for random embeddings.
ModelParams initial_model(const Dataset& train, const Vocabulary& vocabulary,
                          const RunConfig& config, const LinearClassifier& probe);

// Frozen linear recognizer over the mean of K uniformly selected frames.
LinearClassifier train_recognizer(const Dataset& train, const RunConfig& config);

// Recognizer input for a selection: mean of the selected frames' features.
Eigen::RowVectorXd pooled_features(const VideoRecord& video, const std::vector<int>& indices);

// Full training: probe, embedding init, sampler training, recognizer. Train
// videos are pre-sampled to the configured T first.
Pipeline build_pipeline(const Dataset& train, const Vocabulary& vocabulary,
                        const RunConfig& config,
                        const std::function<void(const EpochLog&)>& on_epoch = {});

struct FrameSelection {
  std::vector<int> indices;  // positions in the pre-sampled sequence
  std::vector<std::string> provenance;
  Vector visual_scores;   // empty for baselines
  Vector textual_scores;
};

// Selection for one already pre-sampled video. `video_index` feeds the seed
// of the random policy.
FrameSelection select_frames(Policy policy, const VideoRecord& video,
                             const Vocabulary& vocabulary, const Pipeline& pipeline,
                             const RunConfig& config, std::size_t video_index);

// GFLOPs decomposition of running `policy` on T pre-sampled frames with
// budget K.
FlopsConfig policy_flops(Policy policy, int presample, int budget, const CostModel& costs);

struct PolicyRow {
  std::string policy;
  int budget = 0;
  double gflops = 0.0;
  double map = 0.0;
  double top1 = 0.0;
  double recall = -1.0;  // planted-frame recall; -1 without ground truth
};

void to_json(nlohmann::json& j, const PolicyRow& row);

struct EvalReport {
  std::vector<PolicyRow> rows;
};

// Selects frames per test video under each policy, classifies them with the
// frozen recognizer, and reports mAP / Top-1 / GFLOPs / planted recall.
EvalReport compare_policies(const Dataset& test, const Vocabulary& vocabulary,
                            const std::vector<Policy>& policies, const Pipeline& pipeline,
                            const RunConfig& config);

PolicyRow evaluate_policy(Policy policy, const Dataset& test, const Vocabulary& vocabulary,
                          const Pipeline& pipeline, const RunConfig& config);

// Mean coarse-prediction mAP of the sampler's own visual and textual logits.
struct CoarseScores {
  double visual_map = 0.0;
  double textual_map = 0.0;
};
CoarseScores coarse_prediction_map(const Dataset& test, const Vocabulary& vocabulary,
                                   const Pipeline& pipeline, const RunConfig& config);

// One ablation run: recognizer mAP under fused, visual-only and textual-only
// selection, plus Top-1 and planted recall of the fused policy.
struct AblationResult {
  std::string label;
  double fused_map = 0.0;
  double visual_map = 0.0;
  double textual_map = 0.0;
  double top1 = 0.0;
  double recall = -1.0;
  double final_loss = 0.0;
};

void to_json(nlohmann::json& j, const AblationResult& row);

AblationResult run_ablation_case(const Dataset& train, const Dataset& test,
                                 const Vocabulary& vocabulary, const RunConfig& config,
                                 const std::string& label);

// Median over seeds of every metric (seed s replaces the run seed).
AblationResult median_over_seeds(const Dataset& train, const Dataset& test,
                                 const Vocabulary& vocabulary, RunConfig config,
                                 const std::string& label,
                                 const std::vector<std::uint64_t>& seeds);

// "beta=0,0.2,0.4" -> ("beta", {"0","0.2","0.4"}).
std::pair<std::string, std::vector<std::string>> parse_grid(const std::string& grid);

double median(std::vector<double> values);

}  // namespace tsq
