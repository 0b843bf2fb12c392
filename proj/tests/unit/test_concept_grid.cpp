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

#include <doctest.h>

#include <set>

#include "idealwords/concept_grid.hpp"
#include "idealwords/embedding_table.hpp"
#include "idealwords/errors.hpp"
#include "support/oracles.hpp"

using namespace iw;

namespace {

ConceptGrid colors_objects() {
  return ConceptGrid({{"colors", {"red", "blue", "pink"}}, {"objects", {"car", "house"}}});
}

}  // namespace

TEST_CASE("index_of enumerates with the first factor slowest") {
  const ConceptGrid grid = colors_objects();
  CHECK(grid.cell_count() == 6);
  CHECK(grid.index_of({"red", "car"}) == 0);
  CHECK(grid.index_of({"pink", "house"}) == 5);

  // Enumeration oracle: nested loops in declared order.
  std::size_t expected = 0;
  for (const auto& color : grid.factor(0).values) {
    for (const auto& object : grid.factor(1).values) {
      CHECK(grid.index_of({color, object}) == expected);
      ++expected;
    }
  }
  CHECK(grid.index_of({"blue", "car"}) == 2);
}

TEST_CASE("index_of rejects unknown values and wrong arity") {
  const ConceptGrid grid = colors_objects();
  CHECK_THROWS_AS(grid.index_of({"green", "car"}), InvalidConcept);
  CHECK_THROWS_AS(grid.index_of({"red"}), InvalidConcept);
  CHECK_THROWS_AS(grid.index_of({"red", "car", "x"}), InvalidConcept);
  const std::vector<std::size_t> out_of_range{3, 0};
  CHECK_THROWS_AS(grid.index_of(out_of_range), InvalidConcept);
  CHECK_THROWS_AS(grid.tuple_of(6), InvalidConcept);
}

TEST_CASE("grid construction validates factors") {
  CHECK_THROWS_AS(ConceptGrid({}), InvalidConcept);
  CHECK_THROWS_AS(ConceptGrid(std::vector<Factor>{Factor{"a", {}}}), InvalidConcept);
  CHECK_THROWS_AS(ConceptGrid({{"a", {"x", "y", "x"}}}), InvalidConcept);
  // The same value string in different factors is fine.
  CHECK_NOTHROW(ConceptGrid({{"a", {"x"}}, {"b", {"x"}}}));
}

TEST_CASE("index_of and tuple_of are inverse bijections") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const ConceptGrid grid = testing::random_grid(rng, 4, 6);
    REQUIRE(grid.cell_count() <= 10000);
    std::set<ValueTuple> seen;
    for (std::size_t i = 0; i < grid.cell_count(); ++i) {
      const ValueTuple t = grid.tuple_of(i);
      CHECK(grid.index_of(t) == i);
      seen.insert(t);
    }
    CHECK(seen.size() == grid.cell_count());
  }
}

TEST_CASE("uniform weights") {
  const WeightScheme w = uniform_weights(colors_objects());
  for (double a : w.alpha()[0]) CHECK(a == doctest::Approx(1.0 / 3.0));
  for (double a : w.alpha()[1]) CHECK(a == doctest::Approx(0.5));
  for (double b : w.beta()) CHECK(b == doctest::Approx(1.0 / 6.0));

  const WeightScheme single = uniform_weights(ConceptGrid({{"a", {"p", "q", "r", "s"}}}));
  for (double b : single.beta()) CHECK(b == doctest::Approx(0.25));

  const WeightScheme cube = uniform_weights(testing::make_grid({2, 2, 2}));
  CHECK(cube.beta().size() == 8);
  for (double b : cube.beta()) CHECK(b == doctest::Approx(0.125));
}

TEST_CASE("weights are renormalized and must be positive") {
  const ConceptGrid grid = colors_objects();
  const WeightScheme w(grid, {{2.0, 1.0, 1.0}, {3.0, 1.0}});
  CHECK(w.alpha(0, 0) == doctest::Approx(0.5));
  CHECK(w.alpha(1, 1) == doctest::Approx(0.25));
  CHECK(w.beta(grid.index_of({"red", "car"})) == doctest::Approx(0.375));

  CHECK_THROWS_AS(WeightScheme(grid, {{1.0, 0.0, 1.0}, {1.0, 1.0}}), InvalidConcept);
  CHECK_THROWS_AS(WeightScheme(grid, {{1.0, -1.0, 1.0}, {1.0, 1.0}}), InvalidConcept);
  CHECK_THROWS_AS(WeightScheme(grid, {{1.0, 1.0}, {1.0, 1.0}}), InvalidConcept);
  CHECK_THROWS_AS(WeightScheme(grid, {{1.0, 1.0, 1.0}}), InvalidConcept);
}

TEST_CASE("beta sums to one for random positive alpha") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const ConceptGrid grid = testing::random_grid(rng, 4, 5);
    const WeightScheme w = testing::random_weights(rng, grid);
    for (const auto& a : w.alpha()) {
      double s = 0.0;
      for (double x : a) s += x;
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    double total = 0.0;
    for (double b : w.beta()) total += b;
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("compositional label counts") {
  std::vector<std::string> attrs, objs;
  for (int i = 0; i < 115; ++i) attrs.push_back("attr" + std::to_string(i));
  for (int i = 0; i < 245; ++i) objs.push_back("obj" + std::to_string(i));
  const LabelCounts mit = count_compositional_labels(ConceptGrid({{"attribute", attrs}, {"object", objs}}));
  CHECK(mit.sum == 360);
  CHECK(mit.product == 28175);

  const LabelCounts small = count_compositional_labels(colors_objects());
  CHECK(small.sum == 5);
  CHECK(small.product == 6);
  const LabelCounts cube = count_compositional_labels(testing::make_grid({2, 2, 2}));
  CHECK(cube.sum == 6);
  CHECK(cube.product == 8);
}

TEST_CASE("embedding tables validate shape and finiteness") {
  const ConceptGrid grid = colors_objects();
  CHECK_THROWS_AS(EmbeddingTable::over_grid(grid, Matrix::Zero(5, 3)), ShapeError);
  CHECK_THROWS_AS(EmbeddingTable::over_grid(grid, Matrix::Zero(6, 0)), ShapeError);
  CHECK_THROWS_AS(EmbeddingTable::over_items({}, Matrix::Zero(0, 3)), ShapeError);
  Matrix bad = Matrix::Zero(6, 2);
  bad(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(EmbeddingTable::over_grid(grid, bad), DataError);
  bad(3, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(EmbeddingTable::over_grid(grid, bad), DataError);

  const EmbeddingTable items = EmbeddingTable::over_items({"a", "b"}, Matrix::Ones(2, 2));
  CHECK_THROWS_AS(items.grid(), InvalidConcept);
  CHECK(items.row_labels() == std::vector<std::string>{"a", "b"});
  const EmbeddingTable t = EmbeddingTable::over_grid(grid, Matrix::Zero(6, 2));
  CHECK(t.row_labels()[3] == "blue house");
}

TEST_CASE("normalize_rows produces unit rows once") {
  Matrix rows(2, 2);
  rows << 3, 4, 0, 0;
  const EmbeddingTable t = normalize_rows(EmbeddingTable::over_items({"a", "b"}, rows));
  CHECK(t.normalized());
  CHECK(t.rows()(0, 0) == doctest::Approx(0.6));
  CHECK(t.rows()(0, 1) == doctest::Approx(0.8));
  CHECK(t.rows().row(1).norm() == 0.0);
}
