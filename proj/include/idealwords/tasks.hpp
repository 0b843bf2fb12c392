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

// Application operators built on ideal words: compositional zero-shot
// classification, prompt debiasing, concept retrieval, their metrics, and
// the PCA projection used to visualize grids.
//
// Inputs are expected to be unit-normalized once at ingest (see
// normalize_rows). Nothing here re-normalizes ideal words, debiased labels
// or the image means used for ideal-word retrieval.

#ifndef IDEALWORDS_TASKS_HPP_
#define IDEALWORDS_TASKS_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idealwords/concept_grid.hpp"
#include "idealwords/decomposition.hpp"
#include "idealwords/embedding_table.hpp"

namespace iw {

struct ClassificationResult {
  std::string method;
  std::vector<ValueTuple> predictions;
  // Present only when ground-truth labels were supplied.
  std::optional<double> pair_accuracy;
  std::vector<double> factor_accuracies;
};

// Scores every grid cell against every image; ties go to the lowest cell.
// `labels` may be empty (no accuracies) or hold one tuple per image.
ClassificationResult classify_pair(const EmbeddingTable& text, const EmbeddingTable& images,
                                   std::span<const ValueTuple> labels = {});

// Per factor, the argmax over the shifted ideal words u_0 + u_{z_i}; only
// n_1 + ... + n_k vectors are scored.
ClassificationResult classify_ideal(const EmbeddingTable& text, const WeightScheme& weights,
                                    const EmbeddingTable& images, std::span<const ValueTuple> labels = {});

// One independent label table per factor (one-factor grids, or item tables
// whose items become the factor's values).
ClassificationResult classify_real_words(std::span<const EmbeddingTable> factor_texts, const EmbeddingTable& images,
                                         std::span<const ValueTuple> labels = {});

// Grid the real-word tables jointly define.
ConceptGrid real_words_grid(std::span<const EmbeddingTable> factor_texts);

// Averages (label, attribute) prompt embeddings over the attribute factor.
// The result is a one-factor table over labels and is not re-normalized.
// Throws InvalidConcept unless the grid has exactly two factors.
EmbeddingTable debias_labels(const EmbeddingTable& group_texts);

struct GroupReport {
  std::vector<double> group_accuracy;
  std::vector<std::size_t> group_size;
  double worst_group = 0.0;
  double average = 0.0;  // overall sample accuracy
  double gap = 0.0;      // average - worst_group
};

// Groups are 0 .. group_count-1; every group must have at least one sample
// (MetricError otherwise).
GroupReport group_gap(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                      std::span<const std::size_t> group_ids, std::size_t group_count);

struct ComposeOptions {
  bool remove_coarse_mean = true;
  bool normalize_means = false;
};

// u(context, coarse word) - Mean{v(coarse)} + Mean{v(concept)}. The options
// select the ablations (no mean removal; Norm applied to the means).
Vector retrieval_compose_iw(const Vector& context_text, const Matrix& coarse_images, const Matrix& concept_images,
                            const ComposeOptions& options = {});

// u(context, coarse word) + Norm(Mean{v(concept)}).
Vector retrieval_compose_avg(const Vector& context_text, const Matrix& concept_images);

// Rank of `target` among gallery rows scored by inner product with `query`,
// counting ties in favour of lower gallery indices.
std::size_t retrieval_rank(const Vector& query, const Matrix& gallery, std::size_t target);

// Mean of 1 / rank over queries (rows of `queries`).
double mean_reciprocal_rank(const Matrix& queries, const Matrix& gallery, std::span<const std::size_t> targets);

struct PcaProjection {
  Matrix coordinates;                   // one row per pooled input row, 3 columns
  Matrix directions;                    // 3 x d principal directions
  std::array<double, 3> explained{};    // variance ratio of each direction
  double residual = 0.0;                // variance ratio beyond the third
};

// Pools the rows of all tables, centers them and projects onto the top three
// principal directions. Each direction's largest-magnitude entry is made
// non-negative.
PcaProjection project_top3(std::span<const EmbeddingTable> tables);

}  // namespace iw

#endif  // IDEALWORDS_TASKS_HPP_
