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

#include "tsq/tqm.hpp"

#include <algorithm>
#include <iostream>

namespace tsq {

Matrix textual_frame_features(const FloatMatrix& scores, const FloatMatrix& vocabulary,
                              int top_n) {
  if (scores.cols() != vocabulary.rows())
    throw DimensionError("textual features: " + std::to_string(scores.cols()) +
                         " object scores per frame but " + std::to_string(vocabulary.rows()) +
                         " vocabulary rows");
  if (top_n < 1) throw ConfigError("textual features: top_n must be >= 1");
  const int objects = static_cast<int>(scores.cols());
  const int keep = std::min(top_n, objects);
  const Matrix table = vocabulary.cast<double>();
  Matrix out = Matrix::Zero(scores.rows(), vocabulary.cols());
  std::vector<double> row(objects);
  for (Eigen::Index t = 0; t < scores.rows(); ++t) {
    for (int o = 0; o < objects; ++o) row[o] = scores(t, o);
    const std::vector<int> kept = top_k_indices(row, keep);
    double mass = 0.0;
    for (int o : kept) mass += row[o];
    if (mass <= 0.0) {
      std::clog << "warning: frame " << t << " has no object mass; using uniform weights\n";
      for (int o : kept) out.row(t) += table.row(o);
      out.row(t) /= static_cast<double>(kept.size());
      continue;
    }
    for (int o : kept) out.row(t) += (row[o] / mass) * table.row(o);
  }
  return out;
}

Matrix textual_frame_features(const ObjectScoreSequence& objects,
                              const WordEmbeddingTable& vocabulary, int top_n) {
  return textual_frame_features(objects.scores, vocabulary.rows, top_n);
}

TsqEmbeddingSet textual_embedding_init(const WordEmbeddingTable& class_names, int classes) {
  if (class_names.size() < classes)
    throw InitError("textual embedding init: table has " + std::to_string(class_names.size()) +
                    " class rows, need " + std::to_string(classes));
  return {class_names.rows.topRows(classes).cast<double>(), Modality::Textual};
}

TsqEmbeddingSet random_embedding_init(int classes, int dim, Modality modality, double scale,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return {gaussian_matrix(classes, dim, scale, rng), modality};
}

QueryOutput tqm_forward(const Matrix& textual_features, const ModelParams& params) {
  const BranchForward fwd = branch_forward(params.textual, params.config, textual_features, "tqm");
  return {fwd.saliency(params.config.classes), fwd.logits};
}

QueryOutput tqm_forward(const VideoRecord& video, const WordEmbeddingTable& vocabulary,
                        const ModelParams& params, int top_n) {
  return tqm_forward(textual_frame_features(video.objects, vocabulary, top_n), params);
}

}  // namespace tsq
