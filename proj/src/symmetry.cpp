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

#include "idealwords/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include "idealwords/errors.hpp"

namespace iw {
namespace {

// Applies pi_0 (keep_mean) or pi_1 (!keep_mean) along one grid axis in place.
void average_along(Matrix& rows, const ConceptGrid& grid, std::size_t axis, bool keep_mean) {
  const std::size_t n = grid.factor_size(axis);
  const std::size_t stride = grid.stride(axis);
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::RowVectorXd mean(rows.cols());
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    if ((cell / stride) % n != 0) continue;
    mean.setZero();
    for (std::size_t v = 0; v < n; ++v) mean += rows.row(static_cast<Eigen::Index>(cell + v * stride));
    mean *= inv_n;
    for (std::size_t v = 0; v < n; ++v) {
      auto r = rows.row(static_cast<Eigen::Index>(cell + v * stride));
      if (keep_mean) {
        r = mean;
      } else {
        r -= mean;
      }
    }
  }
}

bool rank_one_matricizations(const ConceptGrid& grid, const std::vector<double>& values, double tol) {
  for (std::size_t axis = 0; axis < grid.factor_count(); ++axis) {
    const std::size_t n = grid.factor_size(axis);
    const std::size_t stride = grid.stride(axis);
    // Columns of the matricization: cells with value 0 on `axis`.
    std::vector<std::size_t> columns;
    for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
      if ((cell / stride) % n == 0) columns.push_back(cell);
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
          for (std::size_t e = c + 1; e < columns.size(); ++e) {
            const double lhs = values[columns[c] + a * stride] * values[columns[e] + b * stride];
            const double rhs = values[columns[e] + a * stride] * values[columns[c] + b * stride];
            if (std::abs(lhs - rhs) > tol * std::max(std::abs(lhs), std::abs(rhs))) return false;
          }
        }
      }
    }
  }
  return true;
}

}  // namespace

std::size_t ComponentMask::active_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

std::vector<ComponentMask> ComponentMask::all(std::size_t k) {
  std::vector<ComponentMask> masks;
  masks.reserve(std::size_t{1} << k);
  for (std::size_t m = 0; m < (std::size_t{1} << k); ++m) {
    ComponentMask mask{std::vector<bool>(k)};
    for (std::size_t i = 0; i < k; ++i) mask.bits[i] = ((m >> i) & 1U) != 0;
    masks.push_back(std::move(mask));
  }
  return masks;
}

EmbeddingTable project_component(const EmbeddingTable& table, const ComponentMask& mask) {
  const ConceptGrid& grid = table.grid();
  if (mask.bits.size() != grid.factor_count()) {
    throw ShapeError("mask has " + std::to_string(mask.bits.size()) + " bits for " +
                     std::to_string(grid.factor_count()) + " factors");
  }
  Matrix rows = table.rows();
  for (std::size_t axis = 0; axis < grid.factor_count(); ++axis) {
    average_along(rows, grid, axis, !mask.bits[axis]);
  }
  return EmbeddingTable::over_grid(grid, std::move(rows));
}

bool decomposable_via_projections(const EmbeddingTable& table, double tol) {
  for (const auto& mask : ComponentMask::all(table.grid().factor_count())) {
    if (!mask.entangled()) continue;
    const EmbeddingTable projected = project_component(table, mask);
    if (projected.rows().rowwise().norm().maxCoeff() > tol) return false;
  }
  return true;
}

bool exp_rank_one_check(const EmbeddingTable& log_slices, double tol) {
  const ConceptGrid& grid = log_slices.grid();
  if (grid.cell_count() > 256) {
    throw ShapeError("tensor-rank check is limited to grids of at most 256 cells");
  }
  // exp(709) is the largest finite double; stay well clear of both ends.
  constexpr double kMaxExponent = 700.0;
  std::vector<double> values(grid.cell_count());
  for (std::size_t col = 0; col < log_slices.dim(); ++col) {
    const auto column = log_slices.rows().col(static_cast<Eigen::Index>(col));
    const double center = column.mean();
    for (std::size_t cell = 0; cell < values.size(); ++cell) {
      const double x = column(static_cast<Eigen::Index>(cell)) - center;
      if (std::abs(x) > kMaxExponent) {
        throw RangeError("log value spread too large to exponentiate (|x - mean| = " + std::to_string(std::abs(x)) +
                         ")");
      }
      values[cell] = std::exp(x);
    }
    if (!rank_one_matricizations(grid, values, tol)) return false;
  }
  return true;
}

}  // namespace iw
