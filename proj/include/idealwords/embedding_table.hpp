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

#ifndef IDEALWORDS_EMBEDDING_TABLE_HPP_
#define IDEALWORDS_EMBEDDING_TABLE_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "idealwords/concept_grid.hpp"

namespace iw {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// One d-dimensional vector per grid cell (rows in lexicographic cell order)
// or per item of an un-factored set such as a folder of images.
class EmbeddingTable {
 public:
  // Both factories throw ShapeError when the row count does not match the
  // index or dim == 0, and DataError on NaN/Inf entries.
  static EmbeddingTable over_grid(ConceptGrid grid, Matrix rows, bool normalized = false);
  static EmbeddingTable over_items(std::vector<std::string> items, Matrix rows, bool normalized = false);

  bool has_grid() const { return std::holds_alternative<ConceptGrid>(index_); }
  // Throws InvalidConcept for item tables.
  const ConceptGrid& grid() const;
  // Item names; for grid tables the space-joined value labels of each cell.
  std::vector<std::string> row_labels() const;
  const std::vector<std::string>& items() const;

  std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows_.cols()); }
  const Matrix& rows() const { return rows_; }
  auto row(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)); }

  // Set when rows were unit-normalized at ingest.
  bool normalized() const { return normalized_; }

 private:
  EmbeddingTable(std::variant<ConceptGrid, std::vector<std::string>> index, Matrix rows, bool normalized);

  std::variant<ConceptGrid, std::vector<std::string>> index_;
  Matrix rows_;
  bool normalized_ = false;
};

// Unit-normalizes every row and marks the table as normalized. Zero rows
// are left unchanged. A table already flagged normalized is returned as is.
EmbeddingTable normalize_rows(const EmbeddingTable& table);

}  // namespace iw

#endif  // IDEALWORDS_EMBEDDING_TABLE_HPP_
