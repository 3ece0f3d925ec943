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

#include "tsq/common.hpp"
#include "tsq/data_model.hpp"
#include "tsq/model.hpp"
#include "tsq/tsq_layer.hpp"

namespace tsq {

// Multinomial logistic regression on raw feature rows. Serves as the
// lightweight frame probe (prototype filtering, MaxConf-L) and as the frozen
// recognizer over pooled frames.
struct LinearClassifier {
  Matrix weight;  // d x C
  Matrix bias;    // 1 x C

  Matrix logits(const Matrix& features) const;
  Vector logits(const Eigen::RowVectorXd& feature) const;
  int classes() const { return static_cast<int>(weight.cols()); }
};

struct LinearFitConfig {
  int epochs = 10;
  int batch_size = 64;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-4;
};

// Mini-batch SGD on softmax cross-entropy; deterministic given `seed`.
LinearClassifier fit_linear_classifier(const Matrix& features, const std::vector<int>& labels,
                                       int classes, const LinearFitConfig& config,
                                       std::uint64_t seed);

// Frame probe: every frame of a training video is labelled with the video's
// category.
LinearClassifier train_frame_probe(const Dataset& train, const LinearFitConfig& config,
                                   std::uint64_t seed);

// Number of frames kept per video: ceil(m% * T), at least one.
int prototype_keep_count(double m_percent, int frame_count);

// Video vector: mean of the top ceil(m% * T) frames the probe classifies
// correctly, ranked by probability of the true class (ties to the lower frame
// index); the mean of all frames when no frame is correct.
Vector prototype_video_vector(const VideoRecord& video, const LinearClassifier& probe,
                              double m_percent);

// Class prototypes: mean of the class's video vectors. Throws InitError when
// a class has no training video.
TsqEmbeddingSet prototype_init(const Dataset& train, int classes, const LinearClassifier& probe,
                               double m_percent = 30.0);

struct QueryOutput {
  Matrix saliency;  // C x T
  Vector logits;    // coarse prediction z
};

QueryOutput vqm_forward(const VideoRecord& video, const ModelParams& params);
QueryOutput vqm_forward(const Matrix& frames, const ModelParams& params);

}  // namespace tsq
