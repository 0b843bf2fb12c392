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

#include "idealwords/concept_grid.hpp"

#include <cmath>
#include <unordered_set>

#include "idealwords/errors.hpp"

namespace iw {

ConceptGrid::ConceptGrid(std::vector<Factor> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidConcept("concept grid needs at least one factor");
  for (const auto& f : factors_) {
    if (f.values.empty()) throw InvalidConcept("factor '" + f.name + "' has no values");
    std::unordered_set<std::string> seen;
    for (const auto& v : f.values) {
      if (!seen.insert(v).second) {
        throw InvalidConcept("duplicate value '" + v + "' in factor '" + f.name + "'");
      }
    }
  }
  strides_.assign(factors_.size(), 1);
  cell_count_ = 1;
  for (std::size_t i = factors_.size(); i-- > 0;) {
    strides_[i] = cell_count_;
    cell_count_ *= factors_[i].size();
  }
}

const Factor& ConceptGrid::factor(std::size_t i) const {
  if (i >= factors_.size()) {
    throw InvalidConcept("factor index " + std::to_string(i) + " out of range");
  }
  return factors_[i];
}

std::size_t ConceptGrid::value_index(std::size_t factor_idx, const std::string& value) const {
  const auto& values = factor(factor_idx).values;
  for (std::size_t v = 0; v < values.size(); ++v) {
    if (values[v] == value) return v;
  }
  throw InvalidConcept("unknown value '" + value + "' for factor '" + factors_[factor_idx].name + "'");
}

std::size_t ConceptGrid::index_of(std::span<const std::size_t> tuple) const {
  if (tuple.size() != factors_.size()) {
    throw InvalidConcept("tuple arity " + std::to_string(tuple.size()) + " does not match " +
                         std::to_string(factors_.size()) + " factors");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i] >= factors_[i].size()) {
      throw InvalidConcept("value index " + std::to_string(tuple[i]) + " out of range for factor '" +
                           factors_[i].name + "'");
    }
    index += tuple[i] * strides_[i];
  }
  return index;
}

std::size_t ConceptGrid::index_of(std::span<const std::string> tuple) const {
  if (tuple.size() != factors_.size()) {
    throw InvalidConcept("tuple arity " + std::to_string(tuple.size()) + " does not match " +
                         std::to_string(factors_.size()) + " factors");
  }
  ValueTuple indices(tuple.size());
  for (std::size_t i = 0; i < tuple.size(); ++i) indices[i] = value_index(i, tuple[i]);
  return index_of(indices);
}

ValueTuple ConceptGrid::tuple_of(std::size_t index) const {
  if (index >= cell_count_) {
    throw InvalidConcept("cell index " + std::to_string(index) + " out of range");
  }
  ValueTuple tuple(factors_.size());
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    tuple[i] = index / strides_[i];
    index %= strides_[i];
  }
  return tuple;
}

std::vector<std::string> ConceptGrid::labels_of(std::size_t index) const {
  const ValueTuple tuple = tuple_of(index);
  std::vector<std::string> labels(tuple.size());
  for (std::size_t i = 0; i < tuple.size(); ++i) labels[i] = factors_[i].values[tuple[i]];
  return labels;
}

std::size_t ConceptGrid::decomposable_dimension_bound() const {
  std::size_t bound = 1;
  for (const auto& f : factors_) bound += f.size() - 1;
  return bound;
}

WeightScheme::WeightScheme(const ConceptGrid& grid, std::vector<std::vector<double>> alpha)
    : alpha_(std::move(alpha)) {
  if (alpha_.size() != grid.factor_count()) {
    throw InvalidConcept("weights given for " + std::to_string(alpha_.size()) + " factors, grid has " +
                         std::to_string(grid.factor_count()));
  }
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    auto& a = alpha_[i];
    if (a.size() != grid.factor_size(i)) {
      throw InvalidConcept("factor '" + grid.factor(i).name + "' expects " +
                           std::to_string(grid.factor_size(i)) + " weights, got " + std::to_string(a.size()));
    }
    double total = 0.0;
    for (double w : a) {
      if (!std::isfinite(w) || w <= 0.0) {
        throw InvalidConcept("weights must be finite and strictly positive (factor '" + grid.factor(i).name + "')");
      }
      total += w;
    }
    // Already-normalized input is kept bit-for-bit so stored weights round-trip.
    if (std::abs(total - 1.0) > 1e-12) {
      for (double& w : a) w /= total;
    }
  }
  beta_.assign(grid.cell_count(), 0.0);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const ValueTuple t = grid.tuple_of(cell);
    double b = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) b *= alpha_[i][t[i]];
    beta_[cell] = b;
  }
}

bool WeightScheme::matches(const ConceptGrid& grid) const {
  if (alpha_.size() != grid.factor_count()) return false;
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (alpha_[i].size() != grid.factor_size(i)) return false;
  }
  return true;
}

WeightScheme uniform_weights(const ConceptGrid& grid) {
  std::vector<std::vector<double>> alpha;
  alpha.reserve(grid.factor_count());
  for (const auto& f : grid.factors()) {
    alpha.emplace_back(f.size(), 1.0 / static_cast<double>(f.size()));
  }
  return WeightScheme(grid, std::move(alpha));
}

LabelCounts count_compositional_labels(const ConceptGrid& grid) {
  LabelCounts counts{0, 1};
  for (const auto& f : grid.factors()) {
    counts.sum += f.size();
    counts.product *= f.size();
  }
  return counts;
}

}  // namespace iw
