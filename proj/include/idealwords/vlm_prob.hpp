/*
 * Copyright 2026 The idealwords Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Bilinear vision-language probability model on finite text and image sets:
//
//   log p(x(z), y) = u_{x(z)}^T v_y + c,   c = -log sum_{z,y} exp(u^T v)
//
// together with the factorization, mode- and order-disentanglement
// predicates and the argmax-preservation property of ideal words.

#ifndef IDEALWORDS_VLM_PROB_HPP_
#define IDEALWORDS_VLM_PROB_HPP_

#include <cstddef>
#include <cstdint>

#include "idealwords/concept_grid.hpp"
#include "idealwords/decomposition.hpp"
#include "idealwords/embedding_table.hpp"

namespace iw {

class JointEmbeddingModel {
 public:
  // `text` must be grid-indexed; dims must match (ShapeError otherwise).
  JointEmbeddingModel(EmbeddingTable text, EmbeddingTable images);

  const EmbeddingTable& text() const { return text_; }
  const EmbeddingTable& images() const { return images_; }
  const ConceptGrid& grid() const { return text_.grid(); }
  std::size_t image_count() const { return images_.size(); }

  // u_{x(z)}^T v_y, cells by rows and images by columns.
  const Eigen::MatrixXd& scores() const { return scores_; }
  double score(std::size_t cell, std::size_t image) const;

  double log_norm() const { return log_norm_; }
  double joint_log_prob(std::size_t cell, std::size_t image) const { return score(cell, image) + log_norm_; }

 private:
  EmbeddingTable text_;
  EmbeddingTable images_;
  Eigen::MatrixXd scores_;
  double log_norm_ = 0.0;
};

// p(x(z) | y) over the cells of the grid.
Vector conditional_text_given_image(const JointEmbeddingModel& model, std::size_t image);

// For every image, fits the best additive model to log p(x(z) | y) over the
// grid and returns true iff the largest absolute residual is <= tol.
bool factorization_check(const JointEmbeddingModel& model, double tol);

// Argmax over values of `factor` is the same set in every context.
bool mode_disentangled(const JointEmbeddingModel& model, std::size_t image, std::size_t factor);

// The pairwise ordering of values of `factor` is the same in every context.
bool order_disentangled(const JointEmbeddingModel& model, std::size_t image, std::size_t factor);

// For each (image, factor) that is mode-disentangled, checks that the
// ideal-word argmax under `weights` lies in the common pairwise argmax set.
bool argmax_preservation_check(const JointEmbeddingModel& model, const WeightScheme& weights);

// Finite-sample evidence for the full-support converse: samples image
// vectors uniformly on the unit sphere and counts those for which some
// factor is not order-disentangled. A run with zero violations is evidence,
// not proof, of decomposability; `distance` is reported alongside.
struct OrderEvidence {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double distance = 0.0;
};

OrderEvidence sample_order_disentanglement(const EmbeddingTable& text, std::size_t samples, std::uint64_t seed);

}  // namespace iw

#endif  // IDEALWORDS_VLM_PROB_HPP_
