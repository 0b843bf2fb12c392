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

#include "idealwords/vlm_prob.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "idealwords/errors.hpp"
#include "idealwords/random.hpp"

namespace iw {
namespace {

double log_sum_exp(const Eigen::Ref<const Eigen::MatrixXd>& values) {
  const double top = values.maxCoeff();
  return top + std::log((values.array() - top).exp().sum());
}

void check_image(const JointEmbeddingModel& model, std::size_t image) {
  if (image >= model.image_count()) {
    throw InvalidConcept("image index " + std::to_string(image) + " out of range");
  }
}

// Cells whose value on `factor` is 0; adding v * stride walks the factor.
std::vector<std::size_t> context_anchors(const ConceptGrid& grid, std::size_t factor) {
  const std::size_t n = grid.factor_size(factor);
  const std::size_t stride = grid.stride(factor);
  std::vector<std::size_t> anchors;
  anchors.reserve(grid.cell_count() / n);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    if ((cell / stride) % n == 0) anchors.push_back(cell);
  }
  return anchors;
}

std::vector<std::size_t> argmax_set(const std::vector<double>& values) {
  const double top = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> best;
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (values[v] == top) best.push_back(v);
  }
  return best;
}

std::vector<double> factor_scores(const JointEmbeddingModel& model, std::size_t image, std::size_t factor,
                                  std::size_t anchor) {
  const ConceptGrid& grid = model.grid();
  std::vector<double> s(grid.factor_size(factor));
  for (std::size_t v = 0; v < s.size(); ++v) s[v] = model.score(anchor + v * grid.stride(factor), image);
  return s;
}

bool order_disentangled_scores(const Eigen::Ref<const Eigen::VectorXd>& scores, const ConceptGrid& grid,
                               std::size_t factor) {
  const std::size_t n = grid.factor_size(factor);
  const std::size_t stride = grid.stride(factor);
  const auto anchors = context_anchors(grid, factor);
  const std::size_t ref = anchors.front();
  auto at = [&](std::size_t anchor, std::size_t v) { return scores(static_cast<Eigen::Index>(anchor + v * stride)); };
  for (std::size_t anchor : anchors) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        if ((at(ref, a) >= at(ref, b)) != (at(anchor, a) >= at(anchor, b))) return false;
      }
    }
  }
  return true;
}

}  // namespace

JointEmbeddingModel::JointEmbeddingModel(EmbeddingTable text, EmbeddingTable images)
    : text_(std::move(text)), images_(std::move(images)) {
  if (!text_.has_grid()) throw ShapeError("text table of a joint model must be grid-indexed");
  if (text_.dim() != images_.dim()) {
    throw ShapeError("text dim " + std::to_string(text_.dim()) + " differs from image dim " +
                     std::to_string(images_.dim()));
  }
  scores_ = text_.rows() * images_.rows().transpose();
  log_norm_ = -log_sum_exp(scores_);
}

double JointEmbeddingModel::score(std::size_t cell, std::size_t image) const {
  return scores_(static_cast<Eigen::Index>(cell), static_cast<Eigen::Index>(image));
}

Vector conditional_text_given_image(const JointEmbeddingModel& model, std::size_t image) {
  check_image(model, image);
  const auto column = model.scores().col(static_cast<Eigen::Index>(image));
  const double top = column.maxCoeff();
  Vector p = (column.array() - top).exp().matrix();
  return p / p.sum();
}

bool factorization_check(const JointEmbeddingModel& model, double tol) {
  const ConceptGrid& grid = model.grid();
  const WeightScheme uniform = uniform_weights(grid);
  for (std::size_t y = 0; y < model.image_count(); ++y) {
    const auto column = model.scores().col(static_cast<Eigen::Index>(y));
    const double lse = log_sum_exp(column);
    Matrix log_p = (column.array() - lse).matrix();
    const EmbeddingTable slice = EmbeddingTable::over_grid(grid, std::move(log_p));
    const EmbeddingTable fitted = reconstruct_table(decompose(slice, uniform));
    if ((slice.rows() - fitted.rows()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

bool mode_disentangled(const JointEmbeddingModel& model, std::size_t image, std::size_t factor) {
  check_image(model, image);
  const ConceptGrid& grid = model.grid();
  (void)grid.factor(factor);
  const auto anchors = context_anchors(grid, factor);
  const auto reference = argmax_set(factor_scores(model, image, factor, anchors.front()));
  for (std::size_t anchor : anchors) {
    if (argmax_set(factor_scores(model, image, factor, anchor)) != reference) return false;
  }
  return true;
}

bool order_disentangled(const JointEmbeddingModel& model, std::size_t image, std::size_t factor) {
  check_image(model, image);
  (void)model.grid().factor(factor);
  return order_disentangled_scores(model.scores().col(static_cast<Eigen::Index>(image)), model.grid(), factor);
}

bool argmax_preservation_check(const JointEmbeddingModel& model, const WeightScheme& weights) {
  const ConceptGrid& grid = model.grid();
  const IdealWordModel ideal = decompose(model.text(), weights);
  for (std::size_t y = 0; y < model.image_count(); ++y) {
    const auto v = model.images().row(y);
    for (std::size_t i = 0; i < grid.factor_count(); ++i) {
      if (!mode_disentangled(model, y, i)) continue;
      const auto common = argmax_set(factor_scores(model, y, i, context_anchors(grid, i).front()));
      std::size_t best = 0;
      double best_score = 0.0;
      for (std::size_t value = 0; value < grid.factor_size(i); ++value) {
        const double s = ideal.component(i, value).dot(v);
        if (value == 0 || s > best_score) {
          best = value;
          best_score = s;
        }
      }
      if (std::find(common.begin(), common.end(), best) == common.end()) return false;
    }
  }
  return true;
}

OrderEvidence sample_order_disentanglement(const EmbeddingTable& text, std::size_t samples, std::uint64_t seed) {
  const ConceptGrid& grid = text.grid();
  Rng rng(seed);
  OrderEvidence evidence;
  evidence.samples = samples;
  evidence.distance = decomposability_distance(text, uniform_weights(grid));
  Vector v(static_cast<Eigen::Index>(text.dim()));
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = rng.normal();
    v.normalize();
    const Vector scores = text.rows() * v;
    for (std::size_t i = 0; i < grid.factor_count(); ++i) {
      if (!order_disentangled_scores(scores, grid, i)) {
        ++evidence.violations;
        break;
      }
    }
  }
  return evidence;
}

}  // namespace iw
