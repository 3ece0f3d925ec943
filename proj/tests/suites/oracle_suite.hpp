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
// Library-versus-oracle comparisons on seeded random instances. Linear
// algebra results must agree to a relative 1e-12; selection and ranking
// results must agree exactly.

#include <map>
#include <string>

#include "support.hpp"
#include "suites/suite_result.hpp"
#include <iostream>

#include "tsq/metrics.hpp"
#include "tsq/sampler.hpp"
#include "tsq/tqm.hpp"
#include "tsq/vqm.hpp"

namespace suites {

inline constexpr double kOracleTolerance = 1e-12;

namespace detail {

inline void close(SuiteResult& r, double error, const std::string& what) {
  r.worst_error = std::max(r.worst_error, error);
  r.record(error <= kOracleTolerance, what + " error " + std::to_string(error));
}

inline tsq::Matrix stochastic_rows(Eigen::Index rows, Eigen::Index cols, tsq::Rng& rng) {
  tsq::Matrix a = testing::rand_uniform(rows, cols, rng);
  for (Eigen::Index r = 0; r < rows; ++r) a.row(r) /= a.row(r).sum();
  return a;
}

}  // namespace detail

// Runs `instances` seeded instances per operation; results keyed by name.
inline std::map<std::string, SuiteResult> run_oracle_suite(int instances, std::uint64_t base_seed) {
  using namespace tsq;
  using testing::rel_error;
  using testing::to_mat;
  std::map<std::string, SuiteResult> out;

  for (int i = 0; i < instances; ++i) {
    Rng rng(base_seed + static_cast<std::uint64_t>(i));
    const std::string tag = "instance " + std::to_string(i);
    const int classes = testing::rand_int(rng, 1, 6);
    const int frames = testing::rand_int(rng, 1, 9);
    const int width = testing::rand_int(rng, 1, 6);

    {  // tsq_attention
      const AttentionParams p{testing::randn(width, width, rng), testing::randn(width, width, rng),
                              testing::randn(width, width, rng)};
      const Matrix e = testing::randn(classes, width, rng);
      const Matrix x = testing::randn(frames, width, rng);
      const Matrix pos = testing::randn(frames, width, rng);
      const bool use_pos = i % 2 == 0;
      const auto got = tsq_attention(e, x, p, pos, use_pos);
      const auto want = oracle::attention(
          to_mat(e), use_pos ? oracle::add_positional(to_mat(x), to_mat(pos)) : to_mat(x),
          to_mat(p.w_q), to_mat(p.w_k), to_mat(p.w_v), 1);
      detail::close(out["tsq_attention"],
                    std::max(rel_error(got.attention, want.mean_attention),
                             rel_error(got.response, want.response)),
                    tag);
    }
    {  // ffn_forward
      const int hidden = testing::rand_int(rng, 1, 8);
      FfnParams p;
      p.expand = {testing::randn(width, hidden, rng), testing::randn(1, hidden, rng)};
      p.contract = {testing::randn(hidden, width, rng), testing::randn(1, width, rng)};
      p.norm_scale = testing::randn(1, width, rng);
      p.norm_shift = testing::randn(1, width, rng);
      const Matrix r = testing::randn(classes, width, rng);
      const oracle::FfnWeights w{to_mat(p.expand.weight),   testing::row_vec(p.expand.bias),
                                 to_mat(p.contract.weight), testing::row_vec(p.contract.bias),
                                 testing::row_vec(p.norm_scale), testing::row_vec(p.norm_shift)};
      const bool normalize = i % 4 != 3;
      detail::close(out["ffn_forward"],
                    rel_error(ffn_forward(r, p, normalize), oracle::ffn(to_mat(r), w, normalize)), tag);
    }
    {  // classifiers
      const Matrix r = testing::randn(classes, width, rng);
      const ClassifierParams cs{testing::randn(classes, width, rng), testing::randn(classes, 1, rng)};
      detail::close(out["class_specific_classifier"],
                    rel_error(class_specific_classify(r, cs),
                              oracle::class_specific(to_mat(r), to_mat(cs.weights),
                                                     testing::col_vec(cs.biases))),
                    tag);
      const ClassifierParams ca{testing::randn(1, width, rng), testing::randn(1, 1, rng)};
      detail::close(out["class_agnostic_classifier"],
                    rel_error(class_agnostic_classify(r, ca),
                              oracle::class_agnostic(to_mat(r), testing::row_vec(ca.weights),
                                                     ca.biases(0, 0))),
                    tag);
    }
    {  // textual_frame_features
      const int objects = testing::rand_int(rng, 1, 20);
      const int dim = testing::rand_int(rng, 1, 6);
      const FloatMatrix table = testing::randn(objects, dim, rng).cast<float>();
      Matrix raw = testing::rand_uniform(frames, objects, rng);
      if (i % 5 == 0) raw = (raw * 3.0).array().floor().matrix();  // ties and zero rows
      for (Eigen::Index t = 0; t < raw.rows(); ++t)
        if (raw.row(t).sum() > 0.0) raw.row(t) /= raw.row(t).sum();
      const FloatMatrix scores = raw.cast<float>();
      const int top = testing::rand_int(rng, 1, objects + 2);
      std::streambuf* saved = std::clog.rdbuf(nullptr);  // silence zero-row warnings
      const Matrix got = textual_frame_features(scores, table, top);
      std::clog.rdbuf(saved);
      detail::close(out["textual_frame_features"],
                    rel_error(got, oracle::textual_features(to_mat(scores), to_mat(table), top)), tag);
    }
    {  // aggregate_saliency
      const Matrix a = detail::stochastic_rows(classes, frames, rng);
      const Vector z = testing::randn(classes, 1, rng, 2.0);
      const int top = testing::rand_int(rng, 1, classes);
      detail::close(out["aggregate_saliency"],
                    rel_error(aggregate_saliency(a, z, top, SaliencySource::Visual).per_frame,
                              oracle::aggregate(to_mat(a), testing::to_vec(z), top)),
                    tag);
    }
    {  // fuse_and_select (exact)
      Matrix v = testing::rand_uniform(frames, 2, rng);
      if (i % 2 == 0) v = (v * 3.0).array().floor().matrix();
      const int budget = testing::rand_int(rng, 1, frames);
      const double lambda = testing::rand_int(rng, 0, 10) / 10.0;
      const SelectionResult got = fuse_and_select({v.col(0), SaliencySource::Visual},
                                                  {v.col(1), SaliencySource::Textual}, budget,
                                                  lambda, 1.0 - lambda);
      const oracle::Fused want =
          oracle::fuse(testing::col_vec(v, 0), testing::col_vec(v, 1), budget, lambda);
      bool same = got.indices == want.indices && got.provenance.size() == want.source.size();
      for (std::size_t k = 0; same && k < want.source.size(); ++k)
        same = static_cast<int>(got.provenance[k]) == want.source[k];
      out["fuse_and_select"].record(same, tag);
    }
    {  // prototype_init
      const int pc = testing::rand_int(rng, 1, 4);
      const int dim = testing::rand_int(rng, 1, 5);
      const double m = testing::rand_int(rng, 1, 100);
      const LinearClassifier probe{testing::randn(dim, pc, rng), testing::randn(1, pc, rng)};
      Dataset d;
      d.class_count = pc;
      std::vector<oracle::ProbeVideo> ov;
      for (int c = 0; c < pc; ++c)
        for (int v = 0; v < testing::rand_int(rng, 1, 3); ++v) {
          VideoRecord video;
          video.label = c;
          video.features.frames = testing::randn(testing::rand_int(rng, 1, 8), dim, rng).cast<float>();
          video.objects.scores = FloatMatrix::Ones(video.frame_count(), 1);
          ov.push_back({to_mat(video.features.frames), c});
          d.videos.push_back(std::move(video));
        }
      detail::close(out["prototype_init"],
                    rel_error(prototype_init(d, pc, probe, m).embeddings,
                              oracle::prototypes(ov, to_mat(probe.weight),
                                                 testing::row_vec(probe.bias), m, pc)),
                    tag);
    }
    {  // mAP and top-1
      const int n = testing::rand_int(rng, 1, 12);
      Matrix s = testing::rand_uniform(n, classes, rng);
      if (i % 3 == 0) s = (s * 3.0).array().floor().matrix();
      std::vector<int> labels;
      for (int k = 0; k < n; ++k) labels.push_back(testing::rand_int(rng, 0, classes - 1));
      detail::close(out["mean_average_precision"],
                    rel_error(mean_average_precision(s, labels).value,
                              oracle::mean_ap(to_mat(s), labels)),
                    tag);
      out["top1_accuracy"].record(top1_accuracy(s, labels) == oracle::top1(to_mat(s), labels), tag);
    }
    {  // MaxConf (exact)
      Matrix logits = testing::randn(frames, classes, rng);
      if (i % 4 == 0) logits.row(frames - 1) = logits.row(0);  // tied confidences
      const int budget = testing::rand_int(rng, 1, frames);
      out["maxconf"].record(baseline_maxconf(logits, budget) == oracle::maxconf(to_mat(logits), budget),
                            tag);
    }
  }
  return out;
}

}  // namespace suites
