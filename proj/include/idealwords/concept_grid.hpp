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

// Factored concept grids Z = Z_1 x ... x Z_k and the product weight
// schemes defined on them. Cells are enumerated lexicographically with the
// first factor varying slowest; that order is part of the on-disk format.

#ifndef IDEALWORDS_CONCEPT_GRID_HPP_
#define IDEALWORDS_CONCEPT_GRID_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iw {

struct Factor {
  std::string name;
  std::vector<std::string> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const Factor&) const = default;
};

// A cell of the grid expressed as one value index per factor.
using ValueTuple = std::vector<std::size_t>;

class ConceptGrid {
 public:
  // Throws InvalidConcept unless k >= 1, every factor has at least one
  // value, and values are unique within each factor.
  explicit ConceptGrid(std::vector<Factor> factors);

  std::size_t factor_count() const { return factors_.size(); }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(std::size_t i) const;
  std::size_t factor_size(std::size_t i) const { return factor(i).size(); }

  // N = prod n_i.
  std::size_t cell_count() const { return cell_count_; }

  // Distance in the flat index between consecutive values of factor i.
  std::size_t stride(std::size_t i) const { return strides_.at(i); }

  std::size_t value_index(std::size_t factor, const std::string& value) const;

  std::size_t index_of(std::span<const std::size_t> tuple) const;
  std::size_t index_of(std::span<const std::string> tuple) const;
  std::size_t index_of(std::initializer_list<std::string> tuple) const {
    return index_of(std::span<const std::string>(tuple.begin(), tuple.size()));
  }
  ValueTuple tuple_of(std::size_t index) const;
  std::vector<std::string> labels_of(std::size_t index) const;

  // 1 + sum (n_i - 1): the largest possible span dimension of a
  // decomposable family on this grid.
  std::size_t decomposable_dimension_bound() const;

  bool operator==(const ConceptGrid& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
  std::size_t cell_count_ = 0;
};

// Per-factor positive weights alpha (each factor sums to one) and the
// induced product weights beta_z = prod_i alpha_{z_i}.
class WeightScheme {
 public:
  // Rejects non-positive or non-finite entries with InvalidConcept, then
  // renormalizes each factor to sum to one.
  WeightScheme(const ConceptGrid& grid, std::vector<std::vector<double>> alpha);

  const std::vector<std::vector<double>>& alpha() const { return alpha_; }
  double alpha(std::size_t factor, std::size_t value) const { return alpha_.at(factor).at(value); }
  double beta(std::size_t cell) const { return beta_.at(cell); }
  const std::vector<double>& beta() const { return beta_; }

  bool matches(const ConceptGrid& grid) const;

 private:
  std::vector<std::vector<double>> alpha_;
  std::vector<double> beta_;
};

WeightScheme uniform_weights(const ConceptGrid& grid);

struct LabelCounts {
  std::size_t sum = 0;      // n_1 + ... + n_k ideal-word vectors
  std::size_t product = 0;  // n_1 * ... * n_k pair vectors
};

LabelCounts count_compositional_labels(const ConceptGrid& grid);

}  // namespace iw

#endif  // IDEALWORDS_CONCEPT_GRID_HPP_
