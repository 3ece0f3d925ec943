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

#include <doctest.h>

#include "support.hpp"
#include "tsq/vqm.hpp"

using namespace tsq;
using testing::rel_error;
using testing::to_mat;

namespace {

VideoRecord make_video(const Matrix& frames, int label, const std::string& id = "v") {
  VideoRecord v;
  v.features.video_id = id;
  v.features.frames = frames.cast<float>();
  v.objects.scores = FloatMatrix::Constant(frames.rows(), 2, 0.5f);
  v.label = label;
  return v;
}

// Perturbs every tensor of a fresh model so that no parameter sits at a
// symmetric starting value.
ModelParams random_model(const ModelConfig& config, Rng& rng) {
  ModelParams p = init_model(config, rng);
  p.visit([&](const std::string&, Matrix& m) { m += testing::randn(m.rows(), m.cols(), rng, 0.5); });
  return p;
}

oracle::Vec end_to_end_logits(const BranchParams& b, const ModelConfig& config,
                              const Matrix& frames, oracle::Mat* attention) {
  oracle::Mat x = oracle::linear(to_mat(frames), to_mat(b.reduce.weight), testing::row_vec(b.reduce.bias));
  if (config.positional) x = oracle::add_positional(x, to_mat(b.positional));
  const oracle::Mat q = oracle::linear(to_mat(b.embeddings), to_mat(b.embed_reduce.weight),
                                       testing::row_vec(b.embed_reduce.bias));
  const auto& layer = b.layers.front();
  const auto att = oracle::attention(q, x, to_mat(layer.attention.w_q), to_mat(layer.attention.w_k),
                                     to_mat(layer.attention.w_v), config.heads);
  const oracle::FfnWeights ffn{to_mat(layer.ffn.expand.weight),   testing::row_vec(layer.ffn.expand.bias),
                               to_mat(layer.ffn.contract.weight), testing::row_vec(layer.ffn.contract.bias),
                               testing::row_vec(layer.ffn.norm_scale),
                               testing::row_vec(layer.ffn.norm_shift)};
  const oracle::Mat r = oracle::ffn(att.response, ffn, config.normalize);
  *attention = att.mean_attention;
  return oracle::class_specific(r, to_mat(b.classifier.weights), testing::col_vec(b.classifier.biases));
}

}  // namespace

TEST_CASE("keep count is ceil(m% of T) and at least one") {
  CHECK(prototype_keep_count(30.0, 8) == 3);
  CHECK(prototype_keep_count(30.0, 10) == 3);
  CHECK(prototype_keep_count(30.0, 50) == 15);
  CHECK(prototype_keep_count(1.0, 5) == 1);
  CHECK(prototype_keep_count(100.0, 7) == 7);
  CHECK_THROWS_AS(prototype_keep_count(0.0, 7), ConfigError);
}

TEST_CASE("single correctly classified frame is its own prototype") {
  LinearClassifier probe{Matrix::Identity(2, 2), Matrix::Zero(1, 2)};
  Matrix f(1, 2);
  f << 3.0, 1.0;  // probe predicts class 0
  Dataset d;
  d.class_count = 1;
  d.videos.push_back(make_video(f, 0));
  probe.weight = Matrix::Identity(2, 1);
  probe.bias = Matrix::Zero(1, 1);
  const auto set = prototype_init(d, 1, probe);
  CHECK(set.embeddings.row(0) == f.row(0));
}

TEST_CASE("two identical videos give that video's vector") {
  Rng rng(1);
  const Matrix frames = testing::randn(5, 3, rng);
  LinearClassifier probe{testing::randn(3, 2, rng), Matrix::Zero(1, 2)};
  Dataset d;
  d.class_count = 2;
  d.videos.push_back(make_video(frames, 1, "a"));
  d.videos.push_back(make_video(frames, 1, "b"));
  d.videos.push_back(make_video(testing::randn(5, 3, rng), 0, "c"));
  const auto set = prototype_init(d, 2, probe);
  const Vector single = prototype_video_vector(d.videos[0], probe, 30.0);
  CHECK((set.embeddings.row(1).transpose() - single).norm() < 1e-15);
}

TEST_CASE("missing class fails prototype initialization by name") {
  Rng rng(2);
  Dataset d;
  d.class_count = 3;
  d.videos.push_back(make_video(testing::randn(4, 2, rng), 0));
  d.videos.push_back(make_video(testing::randn(4, 2, rng), 2));
  const LinearClassifier probe{testing::randn(2, 3, rng), Matrix::Zero(1, 3)};
  try {
    prototype_init(d, 3, probe);
    FAIL("expected InitError");
  } catch (const InitError& e) {
    CHECK(std::string(e.what()).find("class 1") != std::string::npos);
  }
}

TEST_CASE("prototypes match the filter-sort-average oracle") {
  for (int trial = 0; trial < 25; ++trial) {
    Rng rng(500 + trial);
    const int classes = 3, frames = 8, dim = 4;
    const LinearClassifier probe{testing::randn(dim, classes, rng), testing::randn(1, classes, rng)};
    Dataset d;
    d.class_count = classes;
    std::vector<oracle::ProbeVideo> ov;
    for (int c = 0; c < classes; ++c)
      for (int v = 0; v < 2; ++v) {
        // f32 storage: build the oracle input from the rounded values
        const VideoRecord video = make_video(testing::randn(frames, dim, rng), c);
        d.videos.push_back(video);
        ov.push_back({to_mat(video.features.frames), c});
      }
    const auto got = prototype_init(d, classes, probe, 30.0);
    const auto want = oracle::prototypes(ov, to_mat(probe.weight), testing::row_vec(probe.bias), 30.0,
                                         classes);
    CHECK(rel_error(got.embeddings, want) <= 1e-12);
  }
}

TEST_CASE("frame probe separates noise-free class patterns") {
  Rng rng(3);
  const Matrix patterns = testing::randn(3, 5, rng);
  Dataset d;
  d.class_count = 3;
  for (int c = 0; c < 3; ++c)
    for (int v = 0; v < 4; ++v) d.videos.push_back(make_video(Matrix::Ones(3, 1) * patterns.row(c), c));
  LinearFitConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 8;
  const LinearClassifier probe = train_frame_probe(d, cfg, 7);
  for (int c = 0; c < 3; ++c) CHECK(argmax(probe.logits(Eigen::RowVectorXd(patterns.row(c)))) == c);
  const LinearClassifier again = train_frame_probe(d, cfg, 7);
  CHECK(again.weight == probe.weight);
}

TEST_CASE("zero projections give uniform visual saliency") {
  ModelConfig config;
  config.classes = 3;
  config.visual_dim = 4;
  config.text_dim = 2;
  config.reduced_dim = 4;
  config.max_frames = 8;
  Rng rng(4);
  ModelParams p = random_model(config, rng);
  p.visual.layers[0].attention.w_q.setZero();
  const auto out = vqm_forward(testing::randn(6, 4, rng), p);
  for (Eigen::Index c = 0; c < 3; ++c)
    for (Eigen::Index t = 0; t < 6; ++t) CHECK(out.saliency(c, t) == doctest::Approx(1.0 / 6));
  const auto one = vqm_forward(testing::randn(1, 4, rng), p);
  CHECK(one.saliency == Matrix::Ones(3, 1));
}

TEST_CASE("visual query module matches the composed scalar oracle") {
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig config;
    config.classes = 3;
    config.visual_dim = 6;
    config.text_dim = 2;
    config.reduced_dim = 4;
    config.max_frames = 7;
    config.positional = trial % 2 == 0;
    config.heads = trial % 4 == 1 ? 2 : 1;
    Rng rng(600 + trial);
    const ModelParams p = random_model(config, rng);
    const Matrix frames = testing::randn(5, 6, rng);
    oracle::Mat attention;
    const oracle::Vec logits = end_to_end_logits(p.visual, config, frames, &attention);
    const QueryOutput out = vqm_forward(frames, p);
    CHECK(rel_error(out.saliency, attention) <= 1e-12);
    CHECK(rel_error(out.logits, logits) <= 1e-12);
  }
}

TEST_CASE("class-agnostic attention broadcasts one saliency row") {
  ModelConfig config;
  config.classes = 4;
  config.visual_dim = 3;
  config.text_dim = 2;
  config.reduced_dim = 4;
  config.attention = AttentionMode::ClassAgnostic;
  config.classifier = ClassifierMode::ClassAgnostic;
  Rng rng(5);
  const ModelParams p = random_model(config, rng);
  CHECK(p.visual.embeddings.rows() == 1);
  const auto out = vqm_forward(testing::randn(6, 3, rng), p);
  REQUIRE(out.saliency.rows() == 4);
  for (int c = 1; c < 4; ++c) CHECK(out.saliency.row(c) == out.saliency.row(0));
  CHECK(out.logits.size() == 4);
}
