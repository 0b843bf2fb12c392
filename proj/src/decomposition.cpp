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

#include "idealwords/decomposition.hpp"

#include <algorithm>

#include "idealwords/errors.hpp"

namespace iw {

IdealWordModel::IdealWordModel(ConceptGrid grid, WeightScheme weights, Vector base, std::vector<Matrix> components)
    : grid_(std::move(grid)), weights_(std::move(weights)), base_(std::move(base)), components_(std::move(components)) {
  if (!weights_.matches(grid_)) throw ShapeError("weight scheme does not match the model grid");
  if (base_.size() == 0) throw ShapeError("ideal-word model needs a positive dimension");
  if (components_.size() != grid_.factor_count()) {
    throw ShapeError("model has " + std::to_string(components_.size()) + " component blocks for " +
                     std::to_string(grid_.factor_count()) + " factors");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (static_cast<std::size_t>(components_[i].rows()) != grid_.factor_size(i) ||
        components_[i].cols() != base_.size()) {
      throw ShapeError("component block " + std::to_string(i) + " has the wrong shape");
    }
  }
}

Vector IdealWordModel::shifted_component(std::size_t factor, std::size_t value) const {
  return base_ + component(factor, value).transpose();
}

IdealWordModel decompose(const EmbeddingTable& table, const WeightScheme& weights) {
  if (!table.has_grid()) throw ShapeError("decomposition requires a grid-indexed table");
  const ConceptGrid& grid = table.grid();
  if (!weights.matches(grid)) throw ShapeError("weight scheme does not match the table grid");

  const auto d = static_cast<Eigen::Index>(table.dim());
  const std::size_t k = grid.factor_count();

  Vector base = Vector::Zero(d);
  std::vector<Matrix> sums(k);
  for (std::size_t i = 0; i < k; ++i) {
    sums[i] = Matrix::Zero(static_cast<Eigen::Index>(grid.factor_size(i)), d);
  }

  // Single pass in lexicographic cell order keeps every accumulator's
  // summation order fixed.
  ValueTuple tuple(k, 0);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const double beta = weights.beta(cell);
    const auto row = table.row(cell);
    base.noalias() += beta * row.transpose();
    for (std::size_t i = 0; i < k; ++i) {
      sums[i].row(static_cast<Eigen::Index>(tuple[i])).noalias() += beta * row;
    }
    for (std::size_t i = k; i-- > 0;) {
      if (++tuple[i] < grid.factor_size(i)) break;
      tuple[i] = 0;
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (Eigen::Index v = 0; v < sums[i].rows(); ++v) {
      const double alpha = weights.alpha(i, static_cast<std::size_t>(v));
      sums[i].row(v) = sums[i].row(v) / alpha - base.transpose();
    }
  }
  return IdealWordModel(grid, weights, std::move(base), std::move(sums));
}

Vector reconstruct(const IdealWordModel& model, std::span<const std::size_t> tuple) {
  // Validates arity and ranges.
  (void)model.grid().index_of(tuple);
  Vector out = model.base();
  for (std::size_t i = 0; i < tuple.size(); ++i) out += model.component(i, tuple[i]).transpose();
  return out;
}

Vector reconstruct(const IdealWordModel& model, std::span<const std::string> tuple) {
  const std::size_t cell = model.grid().index_of(tuple);
  const ValueTuple t = model.grid().tuple_of(cell);
  return reconstruct(model, t);
}

EmbeddingTable reconstruct_table(const IdealWordModel& model) {
  const ConceptGrid& grid = model.grid();
  Matrix rows(static_cast<Eigen::Index>(grid.cell_count()), static_cast<Eigen::Index>(model.dim()));
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    rows.row(static_cast<Eigen::Index>(cell)) = reconstruct(model, grid.tuple_of(cell)).transpose();
  }
  return EmbeddingTable::over_grid(grid, std::move(rows));
}

double weighted_residual(const EmbeddingTable& table, const IdealWordModel& model) {
  if (!table.has_grid() || !(table.grid() == model.grid()) || table.dim() != model.dim()) {
    throw ShapeError("table and model disagree on grid or dimension");
  }
  const ConceptGrid& grid = model.grid();
  double total = 0.0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const Vector approx = reconstruct(model, grid.tuple_of(cell));
    total += model.weights().beta(cell) * (table.row(cell).transpose() - approx).squaredNorm();
  }
  return total;
}

double decomposability_distance(const EmbeddingTable& table, const WeightScheme& weights) {
  return weighted_residual(table, decompose(table, weights));
}

double default_decomposability_tolerance(const EmbeddingTable& table) {
  const double mean_sq = table.rows().rowwise().squaredNorm().mean();
  return 1e-10 * std::max(1.0, mean_sq);
}

bool is_decomposable(const EmbeddingTable& table) {
  return decomposability_distance(table, uniform_weights(table.grid())) <= default_decomposability_tolerance(table);
}

bool difference_independence_check(const EmbeddingTable& table, double tol) {
  const ConceptGrid& grid = table.grid();
  const std::size_t k = grid.factor_count();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t stride = grid.stride(i);
    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
      const ValueTuple t = grid.tuple_of(cell);
      if (t[i] == 0) continue;
      // Same context, value 0 of factor i.
      const std::size_t anchor = cell - t[i] * stride;
      // Reference context: every other factor at value 0.
      const std::size_t ref_cell = t[i] * stride;
      const Vector diff = table.row(cell) - table.row(anchor);
      const Vector ref = table.row(ref_cell) - table.row(0);
      if ((diff - ref).lpNorm<Eigen::Infinity>() > tol) return false;
    }
  }
  return true;
}

std::size_t span_dimension(const EmbeddingTable& table, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(table.rows()));
  const Vector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cut = tol * sigma(0);
  return static_cast<std::size_t>((sigma.array() > cut).count());
}

}  // namespace iw
