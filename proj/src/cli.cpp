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

#include "idealwords/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "idealwords/decomposition.hpp"
#include "idealwords/errors.hpp"
#include "idealwords/store.hpp"
#include "idealwords/symmetry.hpp"
#include "idealwords/tasks.hpp"
#include "idealwords/vlm_prob.hpp"

namespace iw::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write_value(std::ostringstream& os, const json& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      // json objects are std::map backed, so iteration is key-sorted.
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_value(os, it.value(), indent + 2);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        os << "[]";
        return;
      }
      const bool scalars = std::none_of(v.begin(), v.end(), [](const json& e) { return e.is_structured(); });
      if (scalars) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) os << ", ";
          write_value(os, v[i], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_value(os, v[i], indent + 2);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float:
      os << format_double(v.get<double>());
      return;
    default:
      os << v.dump();
  }
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

WeightScheme weights_from(const std::string& spec, const ConceptGrid& grid) {
  if (spec == "uniform") return uniform_weights(grid);
  const json j = read_json(spec);
  if (!j.is_object()) throw FormatError("weights file must map factor names to arrays of weights");
  std::vector<std::vector<double>> alpha;
  for (const auto& f : grid.factors()) {
    if (!j.contains(f.name) || !j.at(f.name).is_array()) {
      throw InvalidConcept("weights file has no array for factor '" + f.name + "'");
    }
    std::vector<double> a;
    for (const auto& x : j.at(f.name)) {
      if (!x.is_number()) throw FormatError("weights for factor '" + f.name + "' must be numbers");
      a.push_back(x.get<double>());
    }
    alpha.push_back(std::move(a));
  }
  return WeightScheme(grid, std::move(alpha));
}

std::vector<ValueTuple> labels_from(const fs::path& path, const ConceptGrid& grid) {
  const json j = read_json(path);
  if (!j.is_array()) throw FormatError("labels file must be an array with one value list per image");
  std::vector<ValueTuple> labels;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != grid.factor_count()) {
      throw InvalidConcept("each label must list one value per factor");
    }
    ValueTuple t;
    for (std::size_t i = 0; i < entry.size(); ++i) {
      if (!entry[i].is_string()) throw FormatError("label values must be strings");
      t.push_back(grid.value_index(i, entry[i].get<std::string>()));
    }
    labels.push_back(std::move(t));
  }
  return labels;
}

std::vector<std::size_t> targets_from(const fs::path& path, const EmbeddingTable& gallery) {
  const json j = read_json(path);
  if (!j.is_array()) throw FormatError("targets file must be an array of gallery items");
  const auto names = gallery.row_labels();
  std::vector<std::size_t> targets;
  for (const auto& t : j) {
    if (t.is_number_unsigned()) {
      targets.push_back(t.get<std::size_t>());
    } else if (t.is_string()) {
      const auto it = std::find(names.begin(), names.end(), t.get<std::string>());
      if (it == names.end()) throw MetricError("target '" + t.get<std::string>() + "' is not in the gallery");
      targets.push_back(static_cast<std::size_t>(it - names.begin()));
    } else {
      throw FormatError("targets must be gallery item names or indices");
    }
  }
  return targets;
}

ConceptGrid grid_from_specs(const std::vector<std::string>& specs, const std::string& shape) {
  std::vector<Factor> factors;
  if (!specs.empty()) {
    for (const auto& s : specs) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw InvalidConcept("--grid expects name=v1,v2,... (got '" + s + "')");
      Factor f{s.substr(0, eq), {}};
      std::stringstream values(s.substr(eq + 1));
      for (std::string v; std::getline(values, v, ',');) f.values.push_back(v);
      factors.push_back(std::move(f));
    }
  } else {
    std::stringstream dims(shape);
    std::size_t i = 0;
    for (std::string n; std::getline(dims, n, 'x'); ++i) {
      std::size_t count = 0;
      try {
        count = std::stoul(n);
      } catch (const std::exception&) {
        throw InvalidConcept("--shape expects sizes like 3x2 (got '" + shape + "')");
      }
      Factor f{"f" + std::to_string(i), {}};
      for (std::size_t v = 0; v < count; ++v) f.values.push_back("v" + std::to_string(v));
      factors.push_back(std::move(f));
    }
  }
  return ConceptGrid(std::move(factors));
}

json tuple_json(const ConceptGrid& grid, const ValueTuple& t) {
  json out = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back(grid.factor(i).values[t[i]]);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

struct Options {
  std::string input;
  std::vector<std::string> inputs;
  std::string images;
  std::string weights = "uniform";
  std::string output;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  bool normalize = false;

  std::string labels;
  std::string method = "pair";
  std::vector<std::string> factor_tables;

  std::string coarse;
  std::string concept_set;
  std::string gallery;
  std::string targets;
  std::string mode = "iw";

  std::string kind = "decomposable";
  std::vector<std::string> grid;
  std::string shape = "3x2";
  std::size_t dim = 8;
  double noise = 0.0;
  std::size_t image_count = 8;
};

class Runner {
 public:
  Runner(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  EmbeddingTable table(const std::string& path) const {
    EmbeddingTable t = load_table(path);
    return o_.normalize ? normalize_rows(t) : t;
  }

  void emit(const json& report) const { out_ << format_report(report); }

  void decompose_cmd() const {
    const EmbeddingTable t = table(o_.input);
    const WeightScheme w = weights_from(o_.weights, t.grid());
    const IdealWordModel model = decompose(t, w);
    if (!o_.output.empty()) save(model, o_.output);
    emit({{"distance", weighted_residual(t, model)},
          {"span_dim", span_dimension(t, o_.tol)},
          {"bound", t.grid().decomposable_dimension_bound()}});
  }

  void distance_cmd() const {
    const EmbeddingTable t = table(o_.input);
    emit({{"distance", decomposability_distance(t, weights_from(o_.weights, t.grid()))}});
  }

  void check_cmd() const {
    const JointEmbeddingModel model(table(o_.input), table(o_.images));
    const ConceptGrid& grid = model.grid();
    json per_image = json::object();
    const auto names = model.images().row_labels();
    for (std::size_t y = 0; y < model.image_count(); ++y) {
      json factors = json::object();
      for (std::size_t i = 0; i < grid.factor_count(); ++i) {
        factors[grid.factor(i).name] = {{"mode", mode_disentangled(model, y, i)},
                                        {"order", order_disentangled(model, y, i)}};
      }
      per_image[names[y]] = std::move(factors);
    }
    const WeightScheme w = weights_from(o_.weights, grid);
    emit({{"per_image", std::move(per_image)},
          {"factorization", factorization_check(model, o_.tol)},
          {"projections", decomposable_via_projections(model.text(), o_.tol)},
          {"argmax_preserved", argmax_preservation_check(model, w)},
          {"distance", decomposability_distance(model.text(), w)}});
  }

  void classify_cmd() const {
    const EmbeddingTable images = table(o_.images);
    ClassificationResult result;
    std::optional<ConceptGrid> grid;
    std::vector<ValueTuple> labels;
    if (o_.method == "real_words") {
      if (o_.factor_tables.empty()) throw ValidationError("--method real_words needs --factor-table per factor");
      std::vector<EmbeddingTable> tables;
      for (const auto& p : o_.factor_tables) tables.push_back(table(p));
      grid = real_words_grid(tables);
      if (!o_.labels.empty()) labels = labels_from(o_.labels, *grid);
      result = classify_real_words(tables, images, labels);
    } else {
      if (o_.input.empty()) throw ValidationError("--input is required for --method " + o_.method);
      const EmbeddingTable text = table(o_.input);
      grid = text.grid();
      if (!o_.labels.empty()) labels = labels_from(o_.labels, *grid);
      if (o_.method == "pair") {
        result = classify_pair(text, images, labels);
      } else {
        result = classify_ideal(text, weights_from(o_.weights, *grid), images, labels);
      }
    }

    json predictions = json::array();
    const auto names = images.row_labels();
    for (std::size_t y = 0; y < result.predictions.size(); ++y) {
      predictions.push_back({{"image", names[y]}, {"prediction", tuple_json(*grid, result.predictions[y])}});
    }
    if (!o_.output.empty()) write_text(o_.output, format_report({{"predictions", predictions}}));

    json report = {{"method", result.method}, {"predictions", predictions}};
    if (result.pair_accuracy) {
      report["pair_accuracy"] = *result.pair_accuracy;
      json per_factor = json::object();
      for (std::size_t i = 0; i < grid->factor_count(); ++i) {
        per_factor[grid->factor(i).name] = result.factor_accuracies[i];
      }
      report["factor_accuracy"] = std::move(per_factor);
    }
    emit(report);
  }

  void debias_cmd() const {
    const EmbeddingTable groups = table(o_.input);
    const EmbeddingTable labels = debias_labels(groups);
    if (!o_.output.empty()) save(labels, o_.output);
    json report = {{"labels", labels.size()}};
    if (!o_.output.empty()) report["output"] = o_.output;

    if (!o_.images.empty()) {
      if (o_.labels.empty()) throw ValidationError("--images needs --labels with one (label, attribute) per image");
      const EmbeddingTable images = table(o_.images);
      const ConceptGrid& grid = groups.grid();
      const auto truth = labels_from(o_.labels, grid);
      if (truth.size() != images.size()) throw ShapeError("one (label, attribute) pair is needed per image");
      // Group ids are the (label, attribute) cells.
      const ClassificationResult result = classify_pair(labels, images);
      std::vector<std::size_t> predicted, actual, group_ids;
      for (std::size_t y = 0; y < truth.size(); ++y) {
        predicted.push_back(result.predictions[y][0]);
        actual.push_back(truth[y][0]);
        group_ids.push_back(grid.index_of(truth[y]));
      }
      const GroupReport g = group_gap(predicted, actual, group_ids, grid.cell_count());
      json per_group = json::object();
      for (std::size_t c = 0; c < grid.cell_count(); ++c) per_group[groups.row_labels()[c]] = g.group_accuracy[c];
      report["groups"] = std::move(per_group);
      report["worst_group"] = g.worst_group;
      report["average"] = g.average;
      report["gap"] = g.gap;
    }
    emit(report);
  }

  void retrieve_cmd() const {
    const EmbeddingTable queries_text = table(o_.input);
    const EmbeddingTable gallery = table(o_.gallery);
    const auto targets = targets_from(o_.targets, gallery);
    const bool needs_concept = o_.mode != "text";
    const bool needs_coarse = o_.mode == "iw" || o_.mode == "iw_norm_mean";
    if (needs_concept && o_.concept_set.empty()) throw ValidationError("--concept is required for mode " + o_.mode);
    if (needs_coarse && o_.coarse.empty()) throw ValidationError("--coarse is required for mode " + o_.mode);
    const Matrix concept_rows = needs_concept ? table(o_.concept_set).rows() : Matrix();
    const Matrix coarse_rows = needs_coarse ? table(o_.coarse).rows() : Matrix(0, queries_text.dim());

    Matrix queries(queries_text.size(), queries_text.dim());
    for (std::size_t q = 0; q < queries_text.size(); ++q) {
      const Vector text = queries_text.row(q).transpose();
      Vector composed;
      if (o_.mode == "text") {
        composed = text;
      } else if (o_.mode == "avg") {
        composed = retrieval_compose_avg(text, concept_rows);
      } else if (o_.mode == "iw") {
        composed = retrieval_compose_iw(text, coarse_rows, concept_rows);
      } else if (o_.mode == "iw_no_mean_removal") {
        composed = retrieval_compose_iw(text, concept_rows, concept_rows, {.remove_coarse_mean = false});
      } else {
        composed = retrieval_compose_iw(text, coarse_rows, concept_rows, {.normalize_means = true});
      }
      queries.row(static_cast<Eigen::Index>(q)) = composed.transpose();
    }
    emit({{"mode", o_.mode}, {"queries", queries_text.size()}, {"mrr", mean_reciprocal_rank(queries, gallery.rows(), targets)}});
  }

  void project_pca_cmd() const {
    std::vector<EmbeddingTable> tables;
    for (const auto& p : o_.inputs) tables.push_back(table(p));
    const PcaProjection pca = project_top3(tables);
    std::ostringstream csv;
    csv << "id,x,y,z\n";
    Eigen::Index r = 0;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      for (const auto& label : tables[t].row_labels()) {
        const std::string id = tables.size() > 1 ? std::to_string(t) + ":" + label : label;
        csv << csv_field(id);
        for (Eigen::Index c = 0; c < 3; ++c) csv << ',' << format_double(pca.coordinates(r, c));
        csv << '\n';
        ++r;
      }
    }
    write_text(o_.output, csv.str());
    emit({{"explained", {pca.explained[0], pca.explained[1], pca.explained[2]}},
          {"residual", pca.residual},
          {"rows", static_cast<std::size_t>(r)},
          {"output", o_.output}});
  }

  void synth_cmd() const {
    const ConceptGrid grid = grid_from_specs(o_.grid, o_.shape);
    SynthRequest request;
    request.kind = parse_synth_kind(o_.kind);
    request.dim = o_.dim;
    request.noise = o_.noise;
    request.seed = o_.seed;
    request.image_count = o_.image_count;
    const SynthOutput output = synth(grid, request);
    json files = json::array();
    for (const auto& p : write_synth(output, o_.output)) files.push_back(p.string());
    emit({{"files", files}, {"distance", decomposability_distance(output.text, uniform_weights(grid))}});
  }

 private:
  const Options& o_;
  std::ostream& out_;
};

}  // namespace

std::string format_report(const nlohmann::json& report) {
  std::ostringstream os;
  write_value(os, report, 0);
  os << "\n";
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Ideal-word decompositions of factored embedding tables", "iw"};
  app.require_subcommand(1);

  auto add_weights = [&](CLI::App* c) {
    c->add_option("--weights", o.weights, "'uniform' or a JSON file mapping factor -> weights")->capture_default_str();
  };
  auto add_common = [&](CLI::App* c) {
    c->add_flag("--normalize", o.normalize, "Unit-normalize input rows not already flagged as normalized");
  };

  auto* decompose_app = app.add_subcommand("decompose", "Compute ideal words and write a model");
  decompose_app->add_option("--input", o.input, "Grid table manifest")->required();
  decompose_app->add_option("--output", o.output, "Model manifest to write");
  decompose_app->add_option("--tol", o.tol, "Relative singular value cutoff for span_dim")->capture_default_str();
  add_weights(decompose_app);
  add_common(decompose_app);

  auto* distance_app = app.add_subcommand("distance", "Weighted decomposability distance");
  distance_app->add_option("--input", o.input, "Grid table manifest")->required();
  add_weights(distance_app);
  add_common(distance_app);

  auto* check_app = app.add_subcommand("check", "Probabilistic disentanglement report");
  check_app->add_option("--input", o.input, "Text grid table manifest")->required();
  check_app->add_option("--images", o.images, "Image table manifest")->required();
  check_app->add_option("--tol", o.tol, "Tolerance for residual checks")->capture_default_str();
  add_weights(check_app);
  add_common(check_app);

  auto* classify_app = app.add_subcommand("classify", "Compositional zero-shot classification");
  classify_app->add_option("--input", o.input, "Text grid table manifest");
  classify_app->add_option("--images", o.images, "Image table manifest")->required();
  classify_app->add_option("--labels", o.labels, "JSON array of ground-truth value lists, one per image");
  classify_app->add_option("--method", o.method, "pair | ideal | real_words")
      ->check(CLI::IsMember({"pair", "ideal", "real_words"}))
      ->capture_default_str();
  classify_app->add_option("--factor-table", o.factor_tables, "Per-factor label table (real_words)");
  classify_app->add_option("--output", o.output, "Write predictions JSON here");
  add_weights(classify_app);
  add_common(classify_app);

  auto* debias_app = app.add_subcommand("debias", "Average prompts over a spurious attribute");
  debias_app->add_option("--input", o.input, "(label, attribute) grid table manifest")->required();
  debias_app->add_option("--output", o.output, "Label table manifest to write");
  debias_app->add_option("--images", o.images, "Optional image table for group evaluation");
  debias_app->add_option("--labels", o.labels, "JSON array of [label, attribute] per image");
  add_common(debias_app);

  auto* retrieve_app = app.add_subcommand("retrieve", "Concept retrieval with composed queries");
  retrieve_app->add_option("--input", o.input, "Context text table, one query per row")->required();
  retrieve_app->add_option("--gallery", o.gallery, "Gallery image table")->required();
  retrieve_app->add_option("--targets", o.targets, "JSON array of target gallery items per query")->required();
  retrieve_app->add_option("--concept", o.concept_set, "Concept support images");
  retrieve_app->add_option("--coarse", o.coarse, "Coarse-category images");
  retrieve_app->add_option("--mode", o.mode, "iw | avg | text | iw_no_mean_removal | iw_norm_mean")
      ->check(CLI::IsMember({"iw", "avg", "text", "iw_no_mean_removal", "iw_norm_mean"}))
      ->capture_default_str();
  add_common(retrieve_app);

  auto* pca_app = app.add_subcommand("project-pca", "Project tables onto their top three principal directions");
  pca_app->add_option("--input", o.inputs, "Table manifests (repeatable)")->required();
  pca_app->add_option("--output", o.output, "CSV file to write")->required();
  add_common(pca_app);

  auto* synth_app = app.add_subcommand("synth", "Write synthetic fixtures");
  synth_app->add_option("--kind", o.kind, "decomposable | noisy | mode_disentangled")
      ->check(CLI::IsMember({"decomposable", "noisy", "mode_disentangled"}))
      ->capture_default_str();
  synth_app->add_option("--grid", o.grid, "Factor as name=v1,v2,... (repeatable)");
  synth_app->add_option("--shape", o.shape, "Factor sizes such as 3x2 when --grid is absent")->capture_default_str();
  synth_app->add_option("--dim", o.dim, "Embedding dimension")->capture_default_str()->check(CLI::PositiveNumber);
  synth_app->add_option("--noise", o.noise, "Noise scale")->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_app->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  synth_app->add_option("--images", o.image_count, "Images for mode_disentangled")->capture_default_str();
  synth_app->add_option("--output", o.output, "Output path prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const Runner runner(o, out);
  try {
    if (decompose_app->parsed()) runner.decompose_cmd();
    if (distance_app->parsed()) runner.distance_cmd();
    if (check_app->parsed()) runner.check_cmd();
    if (classify_app->parsed()) runner.classify_cmd();
    if (debias_app->parsed()) runner.debias_cmd();
    if (retrieve_app->parsed()) runner.retrieve_cmd();
    if (pca_app->parsed()) runner.project_pca_cmd();
    if (synth_app->parsed()) runner.synth_cmd();
  } catch (const ValidationError& e) {
    err << "iw: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "iw: " << e.what() << "\n";
    return kExitCompute;
  }
  return kExitOk;
}

}  // namespace iw::cli
