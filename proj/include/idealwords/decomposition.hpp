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

// Ideal-word decompositions of grid-indexed embedding tables.
//
// For weights alpha (per factor, summing to one) and beta_z = prod alpha_{z_i},
// the closest decomposable family in the beta-weighted least-squares sense is
//
//   u_0     = sum_z beta_z u_z
//   u_{z_i} = (1 / alpha_{z_i}) sum_{z' : z'_i = z_i} beta_{z'} u_{z'} - u_0
//
// and the approximation of u_z is u_0 + u_{z_1} + ... + u_{z_k}. Components
// satisfy sum_{z_i} alpha_{z_i} u_{z_i} = 0 for every factor.

#ifndef IDEALWORDS_DECOMPOSITION_HPP_
#define IDEALWORDS_DECOMPOSITION_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "idealwords/concept_grid.hpp"
#include "idealwords/embedding_table.hpp"

namespace iw {

class IdealWordModel {
 public:
  // components[i] holds one row per value of factor i. Throws ShapeError on
  // inconsistent shapes.
  IdealWordModel(ConceptGrid grid, WeightScheme weights, Vector base, std::vector<Matrix> components);

  const ConceptGrid& grid() const { return grid_; }
  const WeightScheme& weights() const { return weights_; }
  std::size_t dim() const { return static_cast<std::size_t>(base_.size()); }

  const Vector& base() const { return base_; }
  const Matrix& components(std::size_t factor) const { return components_.at(factor); }
  auto component(std::size_t factor, std::size_t value) const {
    return components_.at(factor).row(static_cast<Eigen::Index>(value));
  }

  // u_0 + u_{z_i}: the shifted ideal word, i.e. the plain weighted average of
  // all rows sharing value z_i.
  Vector shifted_component(std::size_t factor, std::size_t value) const;

 private:
  ConceptGrid grid_;
  WeightScheme weights_;
  Vector base_;
  std::vector<Matrix> components_;
};

// Throws ShapeError for item tables or weights that do not fit the grid.
IdealWordModel decompose(const EmbeddingTable& table, const WeightScheme& weights);

// u_0 + sum_i u_{z_i}. Never normalized.
Vector reconstruct(const IdealWordModel& model, std::span<const std::size_t> tuple);
Vector reconstruct(const IdealWordModel& model, std::span<const std::string> tuple);

// The decomposable table u~ on the model's grid.
EmbeddingTable reconstruct_table(const IdealWordModel& model);

// sum_z beta_z ||u_z - u~_z||^2 of a given model against a table.
double weighted_residual(const EmbeddingTable& table, const IdealWordModel& model);

// sum_z beta_z ||u_z - u~_z||^2 for the optimal decomposable u~. Under
// uniform weights this is the mean squared residual over cells.
double decomposability_distance(const EmbeddingTable& table, const WeightScheme& weights);

// Scale-free threshold 1e-10 * max(1, mean squared row norm).
double default_decomposability_tolerance(const EmbeddingTable& table);

// decomposability_distance(table, uniform) <= default tolerance.
bool is_decomposable(const EmbeddingTable& table);

// True iff for every factor i, u_{(v, c)} - u_{(v', c)} does not depend on
// the context c of the remaining factors (max-norm deviation <= tol).
bool difference_independence_check(const EmbeddingTable& table, double tol);

// Numerical rank of the rows: singular values above tol * sigma_max.
std::size_t span_dimension(const EmbeddingTable& table, double tol);

}  // namespace iw

#endif  // IDEALWORDS_DECOMPOSITION_HPP_
