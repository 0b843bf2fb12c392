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

#include "idealwords/embedding_table.hpp"

#include "idealwords/errors.hpp"

namespace iw {

EmbeddingTable::EmbeddingTable(std::variant<ConceptGrid, std::vector<std::string>> index, Matrix rows,
                               bool normalized)
    : index_(std::move(index)), rows_(std::move(rows)), normalized_(normalized) {
  const std::size_t expected = has_grid() ? std::get<ConceptGrid>(index_).cell_count()
                                          : std::get<std::vector<std::string>>(index_).size();
  if (static_cast<std::size_t>(rows_.rows()) != expected) {
    throw ShapeError("table has " + std::to_string(rows_.rows()) + " rows, index expects " +
                     std::to_string(expected));
  }
  if (rows_.cols() == 0) throw ShapeError("embedding dimension must be positive");
  if (!rows_.allFinite()) throw DataError("embedding table contains NaN or Inf");
}

EmbeddingTable EmbeddingTable::over_grid(ConceptGrid grid, Matrix rows, bool normalized) {
  return EmbeddingTable(std::move(grid), std::move(rows), normalized);
}

EmbeddingTable EmbeddingTable::over_items(std::vector<std::string> items, Matrix rows, bool normalized) {
  if (items.empty()) throw ShapeError("item table needs at least one item");
  return EmbeddingTable(std::move(items), std::move(rows), normalized);
}

const ConceptGrid& EmbeddingTable::grid() const {
  if (!has_grid()) throw InvalidConcept("table is indexed by items, not by a concept grid");
  return std::get<ConceptGrid>(index_);
}

const std::vector<std::string>& EmbeddingTable::items() const {
  if (has_grid()) throw InvalidConcept("table is indexed by a concept grid, not by items");
  return std::get<std::vector<std::string>>(index_);
}

std::vector<std::string> EmbeddingTable::row_labels() const {
  if (!has_grid()) return items();
  const auto& g = grid();
  std::vector<std::string> labels;
  labels.reserve(g.cell_count());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    std::string joined;
    for (const auto& v : g.labels_of(c)) {
      if (!joined.empty()) joined += ' ';
      joined += v;
    }
    labels.push_back(std::move(joined));
  }
  return labels;
}

EmbeddingTable normalize_rows(const EmbeddingTable& table) {
  if (table.normalized()) return table;
  Matrix rows = table.rows();
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double n = rows.row(r).norm();
    if (n > 0.0) rows.row(r) /= n;
  }
  if (table.has_grid()) return EmbeddingTable::over_grid(table.grid(), std::move(rows), true);
  return EmbeddingTable::over_items(table.items(), std::move(rows), true);
}

}  // namespace iw
