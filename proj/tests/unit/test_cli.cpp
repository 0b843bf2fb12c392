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

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "idealwords/cli.hpp"
#include "idealwords/decomposition.hpp"
#include "idealwords/store.hpp"
#include "support/oracles.hpp"

using namespace iw;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kFixtures = IW_FIXTURE_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "iw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json report(const Outcome& o) { return json::parse(o.out); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("iw_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string fixture(const std::string& name) { return (kFixtures / name).string(); }

}  // namespace

TEST_CASE("decompose on the decomposable fixture") {
  TempDir tmp;
  const Outcome o = invoke({"decompose", "--input", fixture("decomposable_2x2.json"), "--output", tmp / "m.json"});
  REQUIRE(o.code == 0);
  const json r = report(o);
  CHECK(r["distance"].get<double>() == 0.0);
  // Four points in the plane.
  CHECK(r["span_dim"].get<int>() == 2);
  CHECK(r["bound"].get<int>() == 3);
  const IdealWordModel m = load_model(tmp / "m.json");
  CHECK(m.base() == Eigen::Vector2d(0.5, 0.5));
  // Sorted keys, 17 digit floats.
  CHECK(o.out == "{\n  \"bound\": 3,\n  \"distance\": 0.0,\n  \"span_dim\": 2\n}\n");
}

TEST_CASE("distance on the perturbed fixture") {
  const Outcome o = invoke({"distance", "--input", fixture("perturbed_2x2.json")});
  REQUIRE(o.code == 0);
  CHECK(report(o)["distance"].get<double>() == doctest::Approx(0.0625).epsilon(1e-12));

  TempDir tmp;
  write_file(tmp / "w.json", R"({"a": [3, 1], "b": [1, 1]})");
  const Outcome w = invoke({"distance", "--input", fixture("perturbed_2x2.json"), "--weights", tmp / "w.json"});
  REQUIRE(w.code == 0);
  const EmbeddingTable t = load_table(fixture("perturbed_2x2.json"));
  const WeightScheme ws(t.grid(), {{0.75, 0.25}, {0.5, 0.5}});
  CHECK(report(w)["distance"].get<double>() == doctest::Approx(decomposability_distance(t, ws)).epsilon(1e-12));
}

TEST_CASE("ideal and pair classification write identical predictions on decomposable text") {
  TempDir tmp;
  REQUIRE(invoke({"synth", "--kind", "decomposable", "--shape", "3x2", "--dim", "6", "--seed", "3", "--output",
                  tmp / "text"}).code == 0);
  REQUIRE(invoke({"synth", "--kind", "noisy", "--shape", "12", "--dim", "6", "--noise", "1", "--seed", "4",
                  "--output", tmp / "imgs"}).code == 0);
  const Outcome pair = invoke({"classify", "--method", "pair", "--input", tmp / "text.json", "--images",
                               tmp / "imgs.json", "--output", tmp / "pair.json"});
  const Outcome ideal = invoke({"classify", "--method", "ideal", "--input", tmp / "text.json", "--images",
                                tmp / "imgs.json", "--output", tmp / "ideal.json"});
  REQUIRE(pair.code == 0);
  REQUIRE(ideal.code == 0);
  CHECK(slurp(tmp / "pair.json") == slurp(tmp / "ideal.json"));
  CHECK(report(pair)["method"] == "pair");
  CHECK(report(ideal)["method"] == "ideal");
  CHECK(report(pair)["predictions"].size() == 12);
}

TEST_CASE("classification reports accuracies") {
  TempDir tmp;
  const EmbeddingTable text = load_table(fixture("decomposable_2x2.json"));
  save(EmbeddingTable::over_items({"p", "q"}, (Matrix(2, 2) << 1, 1, -1, -1).finished()), tmp / "imgs.json");
  write_file(tmp / "labels.json", R"([["a1", "b1"], ["a0", "b1"]])");
  const Outcome o = invoke({"classify", "--input", fixture("decomposable_2x2.json"), "--images", tmp / "imgs.json",
                            "--labels", tmp / "labels.json"});
  REQUIRE(o.code == 0);
  const json r = report(o);
  CHECK(r["pair_accuracy"].get<double>() == 0.5);
  CHECK(r["factor_accuracy"]["a"].get<double>() == 1.0);
  CHECK(r["factor_accuracy"]["b"].get<double>() == 0.5);

  save(EmbeddingTable::over_items({"a0", "a1"}, (Matrix(2, 2) << 0, 0, 1, 0).finished()), tmp / "fa.json");
  save(EmbeddingTable::over_items({"b0", "b1"}, (Matrix(2, 2) << 0, 0, 0, 1).finished()), tmp / "fb.json");
  const Outcome rw = invoke({"classify", "--method", "real_words", "--factor-table", tmp / "fa.json",
                             "--factor-table", tmp / "fb.json", "--images", tmp / "imgs.json"});
  REQUIRE(rw.code == 0);
  CHECK(report(rw)["method"] == "real_words");
  CHECK(invoke({"classify", "--method", "bogus", "--input", fixture("decomposable_2x2.json"), "--images",
                tmp / "imgs.json"}).code == 2);
}

TEST_CASE("check reports disentanglement") {
  TempDir tmp;
  save(EmbeddingTable::over_items({"e1", "e2"}, Matrix::Identity(2, 2)), tmp / "basis.json");
  const Outcome good = invoke({"check", "--input", fixture("decomposable_2x2.json"), "--images", tmp / "basis.json"});
  REQUIRE(good.code == 0);
  const json g = report(good);
  CHECK(g["factorization"] == true);
  CHECK(g["projections"] == true);
  CHECK(g["argmax_preserved"] == true);
  CHECK(g["per_image"]["e1"]["a"]["mode"] == true);

  const Outcome bad = invoke({"check", "--input", fixture("perturbed_2x2.json"), "--images", tmp / "basis.json"});
  REQUIRE(bad.code == 0);
  CHECK(report(bad)["factorization"] == false);
  CHECK(report(bad)["projections"] == false);
}

TEST_CASE("debias writes labels and evaluates groups") {
  TempDir tmp;
  const Outcome o = invoke({"debias", "--input", fixture("perturbed_2x2.json"), "--output", tmp / "labels.json"});
  REQUIRE(o.code == 0);
  CHECK(report(o)["labels"].get<int>() == 2);
  const EmbeddingTable labels = load_table(tmp / "labels.json");
  CHECK(labels.rows() == (Matrix(2, 2) << 0, 0.5, 1, 1).finished());

  save(EmbeddingTable::over_items({"p", "q", "r", "s", "t"},
                                  (Matrix(5, 2) << -1, 0, 2, 0, 2, 1, -1, 1, -1, 0).finished()),
       tmp / "imgs.json");
  write_file(tmp / "truth.json", R"([["a0", "b0"], ["a1", "b0"], ["a1", "b1"], ["a1", "b1"], ["a0", "b1"]])");
  const Outcome e = invoke({"debias", "--input", fixture("perturbed_2x2.json"), "--images", tmp / "imgs.json",
                            "--labels", tmp / "truth.json"});
  REQUIRE(e.code == 0);
  const json r = report(e);
  CHECK(r["average"].get<double>() == 0.8);
  CHECK(r["worst_group"].get<double>() == 0.5);
  CHECK(r["gap"].get<double>() == 0.8 - 0.5);
  CHECK(r["groups"]["a1 b1"].get<double>() == 0.5);
  // (a0, b1) has no samples.
  save(EmbeddingTable::over_items({"p", "q", "r"}, (Matrix(3, 2) << -1, 0, 2, 0, 2, 1).finished()), tmp / "imgs.json");
  write_file(tmp / "truth.json", R"([["a0", "b0"], ["a1", "b0"], ["a1", "b1"]])");
  CHECK(invoke({"debias", "--input", fixture("perturbed_2x2.json"), "--images", tmp / "imgs.json", "--labels",
                tmp / "truth.json"}).code == 3);
  // Label count differs from the image count.
  write_file(tmp / "truth.json", R"([["a0", "b0"]])");
  CHECK(invoke({"debias", "--input", fixture("perturbed_2x2.json"), "--images", tmp / "imgs.json", "--labels",
                tmp / "truth.json"}).code == 2);
}

TEST_CASE("retrieve reports mean reciprocal rank") {
  TempDir tmp;
  save(EmbeddingTable::over_items({"q0", "q1"}, Matrix::Identity(2, 3)), tmp / "q.json");
  save(EmbeddingTable::over_items({"g0", "g1", "g2"}, Matrix::Identity(3, 3)), tmp / "g.json");
  write_file(tmp / "t.json", R"(["g0", 2])");
  const Outcome text = invoke({"retrieve", "--mode", "text", "--input", tmp / "q.json", "--gallery", tmp / "g.json",
                               "--targets", tmp / "t.json"});
  REQUIRE(text.code == 0);
  // q1 = e2 ranks g2 behind g1 and ties with g0 -> rank 3.
  CHECK(report(text)["mrr"].get<double>() == doctest::Approx((1.0 + 1.0 / 3.0) / 2.0));
  CHECK(report(text)["queries"].get<int>() == 2);

  save(EmbeddingTable::over_items({"c"}, (Matrix(1, 3) << 0, 0, 5).finished()), tmp / "concept.json");
  save(EmbeddingTable::over_items({"k"}, (Matrix(1, 3) << 0, 1, 0).finished()), tmp / "coarse.json");
  for (const std::string mode : {"iw", "avg", "iw_no_mean_removal", "iw_norm_mean"}) {
    const Outcome o = invoke({"retrieve", "--mode", mode, "--input", tmp / "q.json", "--gallery", tmp / "g.json",
                              "--targets", tmp / "t.json", "--concept", tmp / "concept.json", "--coarse",
                              tmp / "coarse.json"});
    CAPTURE(mode);
    REQUIRE(o.code == 0);
    CHECK(report(o)["mode"] == mode);
  }
  CHECK(invoke({"retrieve", "--mode", "iw", "--input", tmp / "q.json", "--gallery", tmp / "g.json", "--targets",
                tmp / "t.json"}).code == 2);
  write_file(tmp / "t.json", R"(["g0", "nope"])");
  CHECK(invoke({"retrieve", "--mode", "text", "--input", tmp / "q.json", "--gallery", tmp / "g.json", "--targets",
                tmp / "t.json"}).code == 3);
}

TEST_CASE("project-pca writes a CSV") {
  TempDir tmp;
  REQUIRE(invoke({"synth", "--grid", "color=red,green,blue", "--grid", "shape=cube,ball", "--dim", "8", "--output",
                  tmp / "t"}).code == 0);
  const Outcome o = invoke({"project-pca", "--input", tmp / "t.json", "--output", tmp / "p.csv"});
  REQUIRE(o.code == 0);
  const std::string csv = slurp(tmp / "p.csv");
  CHECK(csv.rfind("id,x,y,z\nred cube,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(report(o)["residual"].get<double>() <= 1e-10);
}

TEST_CASE("synth is deterministic") {
  TempDir tmp;
  for (const std::string name : {"a", "b"}) {
    REQUIRE(invoke({"synth", "--kind", "mode_disentangled", "--shape", "3x2", "--dim", "4", "--noise", "0.2",
                    "--seed", "9", "--images", "6", "--output", tmp / name}).code == 0);
  }
  CHECK(slurp(tmp / "a.bin") == slurp(tmp / "b.bin"));
  CHECK(slurp(tmp / "a_images.bin") == slurp(tmp / "b_images.bin"));
  CHECK(invoke({"synth", "--kind", "weird", "--output", tmp / "c"}).code == 2);
  CHECK(invoke({"synth", "--shape", "3xq", "--output", tmp / "c"}).code == 2);
  CHECK(invoke({"synth", "--kind", "mode_disentangled", "--shape", "4x4x4", "--dim", "2", "--noise", "100",
                "--images", "200", "--output", tmp / "c"}).code == 3);
}

TEST_CASE("exit codes for bad invocations") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"distance", "--input", fixture("decomposable_2x2.json"), "--frobnicate"}).code == 2);
  CHECK(invoke({"nonsense"}).code == 2);
  CHECK(invoke({"distance"}).code == 2);
  CHECK(invoke({"distance", "--input", fixture("corrupt/truncated.json")}).code == 2);
  CHECK(invoke({"distance", "--input", fixture("corrupt/nan_value.json")}).code == 2);
  CHECK(invoke({"distance", "--input", fixture("no_such_file.json")}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
  TempDir tmp;
  write_file(tmp / "w.json", R"({"a": [1, -1], "b": [1, 1]})");
  CHECK(invoke({"distance", "--input", fixture("decomposable_2x2.json"), "--weights", tmp / "w.json"}).code == 2);
  const Outcome o = invoke({"decompose", "--input", fixture("decomposable_2x2.json"), "--bogus"});
  CHECK(o.code == 2);
  CHECK_FALSE(o.err.empty());
}

TEST_CASE("report formatting") {
  CHECK(cli::format_report(json{{"b", 1.0}, {"a", 0.1}}) == "{\n  \"a\": 0.10000000000000001,\n  \"b\": 1.0\n}\n");
  CHECK(cli::format_report(json{{"x", json::array({1, 2.5})}}) == "{\n  \"x\": [1, 2.5]\n}\n");
  CHECK(cli::format_report(json{{"nan", std::nan("")}}) == "{\n  \"nan\": null\n}\n");
}
