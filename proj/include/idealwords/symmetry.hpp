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

// Group-averaging projections on grid-indexed tables.
//
// The product of symmetric groups S_{n_1} x ... x S_{n_k} acts on the grid by
// permuting values within each factor. Along one factor, pi_0 averages over
// the factor and pi_1 = id - pi_0 removes that average; tensoring one choice
// per factor gives the projection pi_eps for a mask eps in {0,1}^k. The masks
// with at most one active bit span the decomposable tables; every other
// ("entangled") projection of a decomposable table is zero.

#ifndef IDEALWORDS_SYMMETRY_HPP_
#define IDEALWORDS_SYMMETRY_HPP_

#include <cstddef>
#include <vector>

#include "idealwords/embedding_table.hpp"

namespace iw {

struct ComponentMask {
  std::vector<bool> bits;

  std::size_t active_count() const;
  bool entangled() const { return active_count() > 1; }

  // All 2^k masks, bit i of the enumeration index mapping to factor i.
  static std::vector<ComponentMask> all(std::size_t k);
};

// Throws ShapeError when the mask length differs from the factor count.
EmbeddingTable project_component(const EmbeddingTable& table, const ComponentMask& mask);

// True iff ||pi_eps(u_z)|| <= tol for every z and every entangled mask.
bool decomposable_via_projections(const EmbeddingTable& table, double tol);

// Each column of `log_slices` is a scalar functional of the table laid out on
// the grid. Returns true iff exp of every column, centered by its grand mean,
// is a rank-one tensor: all 2x2 minors of every single-factor matricization
// vanish to relative tolerance tol. Grids above 256 cells are rejected with
// ShapeError; exponent overflow raises RangeError.
bool exp_rank_one_check(const EmbeddingTable& log_slices, double tol);

}  // namespace iw

#endif  // IDEALWORDS_SYMMETRY_HPP_
