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
// Randomized structural properties of the query modules and the sampler.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "support.hpp"
#include "suites/suite_result.hpp"
#include "tsq/interaction.hpp"
#include "tsq/sampler.hpp"
#include "tsq/tqm.hpp"
#include "tsq/vqm.hpp"

namespace suites {

namespace detail {

inline tsq::ModelConfig random_config(tsq::Rng& rng) {
  tsq::ModelConfig c;
  c.classes = testing::rand_int(rng, 2, 6);
  c.visual_dim = testing::rand_int(rng, 1, 6);
  c.text_dim = testing::rand_int(rng, 1, 6);
  c.heads = testing::rand_int(rng, 1, 2);
  c.reduced_dim = c.heads * testing::rand_int(rng, 1, 3);
  c.max_frames = 10;
  c.layers = testing::rand_int(rng, 1, 2);
  c.self_attention = testing::rand_int(rng, 0, 1) == 1;
  c.attention = testing::rand_int(rng, 0, 2) == 0 ? tsq::AttentionMode::ClassAgnostic
                                                   : tsq::AttentionMode::ClassSpecific;
  c.classifier = testing::rand_int(rng, 0, 2) == 0 ? tsq::ClassifierMode::ClassAgnostic
                                                    : tsq::ClassifierMode::ClassSpecific;
  return c;
}

inline tsq::ModelParams random_params(const tsq::ModelConfig& c, tsq::Rng& rng) {
  tsq::ModelParams p = tsq::init_model(c, rng);
  p.visit([&](const std::string&, tsq::Matrix& m) { m += testing::randn(m.rows(), m.cols(), rng, 0.7); });
  return p;
}

inline std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

}  // namespace detail

inline std::map<std::string, SuiteResult> run_invariant_suite(int trials, std::uint64_t base_seed) {
  using namespace tsq;
  std::map<std::string, SuiteResult> out;

  for (int i = 0; i < trials; ++i) {
    Rng rng(base_seed + static_cast<std::uint64_t>(i));
    const std::string tag = "trial " + std::to_string(i);
    ModelConfig config = detail::random_config(rng);
    const int frames = testing::rand_int(rng, 1, 10);

    {  // every saliency matrix is row stochastic
      const ModelParams p = detail::random_params(config, rng);
      const QueryOutput v = vqm_forward(testing::randn(frames, config.visual_dim, rng), p);
      const QueryOutput t = tqm_forward(testing::randn(frames, config.text_dim, rng), p);
      out["row_stochastic_saliency"].record(
          is_row_stochastic(v.saliency, 1e-12) && is_row_stochastic(t.saliency, 1e-12) &&
              v.saliency.rows() == config.classes && v.saliency.cols() == frames,
          tag);
    }
    {  // without positions, permuting frames permutes saliency columns only
      config.positional = false;
      const ModelParams p = detail::random_params(config, rng);
      const Matrix x = testing::randn(frames, config.visual_dim, rng);
      std::vector<int> perm(frames);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Matrix xp(frames, x.cols());
      for (int t = 0; t < frames; ++t) xp.row(t) = x.row(perm[t]);
      const QueryOutput a = vqm_forward(x, p);
      const QueryOutput b = vqm_forward(xp, p);
      double err = (a.logits - b.logits).cwiseAbs().maxCoeff();
      for (int t = 0; t < frames; ++t)
        err = std::max(err, (a.saliency.col(perm[t]) - b.saliency.col(t)).cwiseAbs().maxCoeff());
      out["permutation_equivariance"].record(err < 1e-10, tag + " error " + std::to_string(err));
      config.positional = true;
    }
    {  // softmax and aggregation ignore a constant logit shift
      const Vector z = testing::randn(config.classes, 1, rng, 3.0);
      const double shift = testing::randn(1, 1, rng, 50.0)(0, 0);
      const Vector zs = (z.array() + shift).matrix();
      Matrix a = testing::rand_uniform(config.classes, frames, rng);
      for (Eigen::Index r = 0; r < a.rows(); ++r) a.row(r) /= a.row(r).sum();
      const int top = testing::rand_int(rng, 1, config.classes);
      const double err = std::max(
          (softmax(z) - softmax(zs)).cwiseAbs().maxCoeff(),
          (aggregate_saliency(a, z, top, SaliencySource::Visual).per_frame -
           aggregate_saliency(a, zs, top, SaliencySource::Visual).per_frame)
              .cwiseAbs()
              .maxCoeff());
      out["softmax_shift_invariance"].record(err < 1e-12, tag);
      out["cross_entropy_shift_invariance"].record(
          std::abs(cross_entropy(z, 0).loss - cross_entropy(zs, 0).loss) < 1e-9, tag);
    }
    {  // fusion: exactly K distinct indices, invariant to monotone rescaling
      const Vector sv = testing::rand_uniform(frames, 1, rng).col(0);
      const Vector st = testing::rand_uniform(frames, 1, rng).col(0);
      const int budget = testing::rand_int(rng, 1, frames);
      const double lambda = testing::rand_int(rng, 0, 10) / 10.0;
      const SelectionResult r = fuse_and_select({sv, SaliencySource::Visual},
                                                {st, SaliencySource::Textual}, budget, lambda,
                                                1.0 - lambda);
      const auto set = detail::as_set(r.indices);
      bool ok = static_cast<int>(r.indices.size()) == budget && static_cast<int>(set.size()) == budget;
      for (int idx : r.indices) ok = ok && idx >= 0 && idx < frames;
      out["fusion_k_distinct"].record(ok, tag);

      const double gain = std::exp(testing::randn(1, 1, rng)(0, 0));
      const Vector sv2 = (gain * sv.array().cube() + 3.0).matrix();
      const Vector st2 = st.array().exp().matrix();
      const SelectionResult r2 = fuse_and_select({sv2, SaliencySource::Visual},
                                                 {st2, SaliencySource::Textual}, budget, lambda,
                                                 1.0 - lambda);
      out["fusion_monotone_rescaling"].record(detail::as_set(r2.indices) == set, tag);
    }
    {  // class-specific classifier: row c only moves z_c
      const int width = testing::rand_int(rng, 1, 5);
      const ClassifierParams p{testing::randn(config.classes, width, rng),
                               testing::randn(config.classes, 1, rng)};
      Matrix r = testing::randn(config.classes, width, rng);
      const Vector before = class_specific_classify(r, p);
      const int c = testing::rand_int(rng, 0, config.classes - 1);
      r.row(c) += testing::randn(1, width, rng, 2.0);
      const Vector after = class_specific_classify(r, p);
      bool ok = true;
      for (int k = 0; k < config.classes; ++k)
        if (k != c) ok = ok && after[k] == before[k];
      out["classifier_locality"].record(ok, tag);
    }
  }
  return out;
}

}  // namespace suites
