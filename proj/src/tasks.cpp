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

#include "idealwords/tasks.hpp"

#include <algorithm>
#include <cmath>

#include "idealwords/errors.hpp"

namespace iw {
namespace {

// Lowest index among the maxima.
std::size_t argmax(const Vector& scores) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

void check_images(std::size_t dim, const EmbeddingTable& images, std::span<const ValueTuple> labels,
                  std::size_t factor_count) {
  if (images.dim() != dim) {
    throw ShapeError("image dim " + std::to_string(images.dim()) + " differs from text dim " + std::to_string(dim));
  }
  if (!labels.empty() && labels.size() != images.size()) {
    throw ShapeError(std::to_string(labels.size()) + " labels for " + std::to_string(images.size()) + " images");
  }
  for (const auto& label : labels) {
    if (label.size() != factor_count) throw ShapeError("label arity differs from the factor count");
  }
}

void score_accuracy(ClassificationResult& result, std::span<const ValueTuple> labels, std::size_t factor_count) {
  if (labels.empty()) return;
  std::size_t pair_hits = 0;
  std::vector<std::size_t> factor_hits(factor_count, 0);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const auto& predicted = result.predictions[n];
    bool all = true;
    for (std::size_t i = 0; i < factor_count; ++i) {
      if (predicted[i] == labels[n][i]) {
        ++factor_hits[i];
      } else {
        all = false;
      }
    }
    if (all) ++pair_hits;
  }
  const auto total = static_cast<double>(labels.size());
  result.pair_accuracy = static_cast<double>(pair_hits) / total;
  result.factor_accuracies.clear();
  for (std::size_t hits : factor_hits) result.factor_accuracies.push_back(static_cast<double>(hits) / total);
}

Vector column_mean(const Matrix& rows, const char* what) {
  if (rows.rows() == 0) throw MetricError(std::string(what) + " image set is empty");
  return rows.colwise().mean().transpose();
}

Vector unit(const Vector& v) {
  const double n = v.norm();
  if (n == 0.0) throw MetricError("cannot normalize a zero mean vector");
  return v / n;
}

}  // namespace

ClassificationResult classify_pair(const EmbeddingTable& text, const EmbeddingTable& images,
                                   std::span<const ValueTuple> labels) {
  const ConceptGrid& grid = text.grid();
  check_images(text.dim(), images, labels, grid.factor_count());
  ClassificationResult result;
  result.method = "pair";
  result.predictions.reserve(images.size());
  for (std::size_t y = 0; y < images.size(); ++y) {
    const Vector scores = text.rows() * images.row(y).transpose();
    result.predictions.push_back(grid.tuple_of(argmax(scores)));
  }
  score_accuracy(result, labels, grid.factor_count());
  return result;
}

ClassificationResult classify_ideal(const EmbeddingTable& text, const WeightScheme& weights,
                                    const EmbeddingTable& images, std::span<const ValueTuple> labels) {
  const ConceptGrid& grid = text.grid();
  check_images(text.dim(), images, labels, grid.factor_count());
  const IdealWordModel model = decompose(text, weights);

  std::vector<Matrix> shifted(grid.factor_count());
  for (std::size_t i = 0; i < grid.factor_count(); ++i) {
    shifted[i] = model.components(i).rowwise() + model.base().transpose();
  }

  ClassificationResult result;
  result.method = "ideal";
  result.predictions.reserve(images.size());
  for (std::size_t y = 0; y < images.size(); ++y) {
    ValueTuple prediction(grid.factor_count());
    for (std::size_t i = 0; i < grid.factor_count(); ++i) {
      prediction[i] = argmax(shifted[i] * images.row(y).transpose());
    }
    result.predictions.push_back(std::move(prediction));
  }
  score_accuracy(result, labels, grid.factor_count());
  return result;
}

ConceptGrid real_words_grid(std::span<const EmbeddingTable> factor_texts) {
  if (factor_texts.empty()) throw ShapeError("real-word classification needs one table per factor");
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < factor_texts.size(); ++i) {
    const auto& t = factor_texts[i];
    if (t.has_grid()) {
      if (t.grid().factor_count() != 1) throw ShapeError("real-word label tables must have a single factor");
      factors.push_back(t.grid().factor(0));
    } else {
      factors.push_back(Factor{"factor" + std::to_string(i), t.items()});
    }
  }
  return ConceptGrid(std::move(factors));
}

ClassificationResult classify_real_words(std::span<const EmbeddingTable> factor_texts, const EmbeddingTable& images,
                                         std::span<const ValueTuple> labels) {
  const ConceptGrid grid = real_words_grid(factor_texts);
  for (const auto& t : factor_texts) {
    if (t.dim() != factor_texts.front().dim()) throw ShapeError("real-word label tables differ in dimension");
  }
  check_images(factor_texts.front().dim(), images, labels, grid.factor_count());
  ClassificationResult result;
  result.method = "real_words";
  result.predictions.reserve(images.size());
  for (std::size_t y = 0; y < images.size(); ++y) {
    ValueTuple prediction(grid.factor_count());
    for (std::size_t i = 0; i < grid.factor_count(); ++i) {
      prediction[i] = argmax(factor_texts[i].rows() * images.row(y).transpose());
    }
    result.predictions.push_back(std::move(prediction));
  }
  score_accuracy(result, labels, grid.factor_count());
  return result;
}

EmbeddingTable debias_labels(const EmbeddingTable& group_texts) {
  const ConceptGrid& grid = group_texts.grid();
  if (grid.factor_count() != 2) {
    throw InvalidConcept("debiasing expects a (label, attribute) grid, got " + std::to_string(grid.factor_count()) +
                         " factors");
  }
  const std::size_t n_labels = grid.factor_size(0);
  const std::size_t n_attrs = grid.factor_size(1);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n_labels), static_cast<Eigen::Index>(group_texts.dim()));
  for (std::size_t label = 0; label < n_labels; ++label) {
    for (std::size_t attr = 0; attr < n_attrs; ++attr) {
      out.row(static_cast<Eigen::Index>(label)) += group_texts.row(label * grid.stride(0) + attr);
    }
  }
  out /= static_cast<double>(n_attrs);
  return EmbeddingTable::over_grid(ConceptGrid({grid.factor(0)}), std::move(out));
}

GroupReport group_gap(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                      std::span<const std::size_t> group_ids, std::size_t group_count) {
  if (predictions.size() != labels.size() || labels.size() != group_ids.size()) {
    throw ShapeError("predictions, labels and group ids must be aligned");
  }
  if (predictions.empty()) throw MetricError("no samples to evaluate");
  if (group_count == 0) throw MetricError("no groups declared");
  std::vector<std::size_t> hits(group_count, 0);
  GroupReport report;
  report.group_size.assign(group_count, 0);
  std::size_t total_hits = 0;
  for (std::size_t n = 0; n < predictions.size(); ++n) {
    if (group_ids[n] >= group_count) {
      throw MetricError("group id " + std::to_string(group_ids[n]) + " out of range");
    }
    ++report.group_size[group_ids[n]];
    if (predictions[n] == labels[n]) {
      ++hits[group_ids[n]];
      ++total_hits;
    }
  }
  for (std::size_t g = 0; g < group_count; ++g) {
    if (report.group_size[g] == 0) throw MetricError("group " + std::to_string(g) + " has no samples");
    report.group_accuracy.push_back(static_cast<double>(hits[g]) / static_cast<double>(report.group_size[g]));
  }
  report.worst_group = *std::min_element(report.group_accuracy.begin(), report.group_accuracy.end());
  report.average = static_cast<double>(total_hits) / static_cast<double>(predictions.size());
  report.gap = report.average - report.worst_group;
  return report;
}

Vector retrieval_compose_iw(const Vector& context_text, const Matrix& coarse_images, const Matrix& concept_images,
                            const ComposeOptions& options) {
  if (coarse_images.cols() != context_text.size() || concept_images.cols() != context_text.size()) {
    throw ShapeError("retrieval inputs differ in dimension");
  }
  Vector concept_mean = column_mean(concept_images, "concept");
  Vector coarse_mean = column_mean(coarse_images, "coarse");
  if (options.normalize_means) {
    concept_mean = unit(concept_mean);
    coarse_mean = unit(coarse_mean);
  }
  Vector out = context_text + concept_mean;
  if (options.remove_coarse_mean) out -= coarse_mean;
  return out;
}

Vector retrieval_compose_avg(const Vector& context_text, const Matrix& concept_images) {
  if (concept_images.cols() != context_text.size()) throw ShapeError("retrieval inputs differ in dimension");
  return context_text + unit(column_mean(concept_images, "concept"));
}

std::size_t retrieval_rank(const Vector& query, const Matrix& gallery, std::size_t target) {
  if (target >= static_cast<std::size_t>(gallery.rows())) {
    throw MetricError("ground-truth item " + std::to_string(target) + " is not in the gallery");
  }
  if (gallery.cols() != query.size()) throw ShapeError("query and gallery differ in dimension");
  const Vector scores = gallery * query;
  const double s = scores(static_cast<Eigen::Index>(target));
  std::size_t rank = 1;
  for (Eigen::Index g = 0; g < scores.size(); ++g) {
    if (scores(g) > s || (scores(g) == s && static_cast<std::size_t>(g) < target)) ++rank;
  }
  return rank;
}

double mean_reciprocal_rank(const Matrix& queries, const Matrix& gallery, std::span<const std::size_t> targets) {
  if (static_cast<std::size_t>(queries.rows()) != targets.size()) {
    throw ShapeError(std::to_string(queries.rows()) + " queries for " + std::to_string(targets.size()) + " targets");
  }
  if (targets.empty()) throw MetricError("no queries to evaluate");
  double total = 0.0;
  for (std::size_t q = 0; q < targets.size(); ++q) {
    const Vector query = queries.row(static_cast<Eigen::Index>(q)).transpose();
    total += 1.0 / static_cast<double>(retrieval_rank(query, gallery, targets[q]));
  }
  return total / static_cast<double>(targets.size());
}

PcaProjection project_top3(std::span<const EmbeddingTable> tables) {
  if (tables.empty()) throw ShapeError("no tables to project");
  const auto d = static_cast<Eigen::Index>(tables.front().dim());
  Eigen::Index n = 0;
  for (const auto& t : tables) {
    if (static_cast<Eigen::Index>(t.dim()) != d) throw ShapeError("tables differ in dimension");
    n += static_cast<Eigen::Index>(t.size());
  }
  if (n < 2) throw ShapeError("PCA needs at least two rows");

  Eigen::MatrixXd pooled(n, d);
  Eigen::Index offset = 0;
  for (const auto& t : tables) {
    pooled.middleRows(offset, static_cast<Eigen::Index>(t.size())) = t.rows();
    offset += static_cast<Eigen::Index>(t.size());
  }
  const Eigen::RowVectorXd mean = pooled.colwise().mean();
  pooled.rowwise() -= mean;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(pooled, Eigen::ComputeThinV);
  const Vector sigma = svd.singularValues();
  const double total = sigma.squaredNorm();

  PcaProjection out;
  out.directions = Matrix::Zero(3, d);
  const Eigen::Index available = std::min<Eigen::Index>(3, sigma.size());
  for (Eigen::Index c = 0; c < available; ++c) {
    Vector dir = svd.matrixV().col(c);
    Eigen::Index top = 0;
    dir.cwiseAbs().maxCoeff(&top);
    if (dir(top) < 0.0) dir = -dir;
    out.directions.row(c) = dir.transpose();
    const double var = sigma(c) * sigma(c);
    out.explained[static_cast<std::size_t>(c)] = total > 0.0 ? var / total : 0.0;
  }
  if (total > 0.0 && sigma.size() > 3) out.residual = sigma.tail(sigma.size() - 3).squaredNorm() / total;
  out.coordinates = pooled * out.directions.transpose();
  return out;
}

}  // namespace iw
