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

#include "idealwords/store.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "idealwords/errors.hpp"
#include "idealwords/random.hpp"
#include "idealwords/vlm_prob.hpp"

namespace iw {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path data_path_for(const fs::path& manifest_path) {
  fs::path data = manifest_path.filename();
  data.replace_extension(".bin");
  return data;
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + quoted(path) + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + quoted(path));
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + quoted(path));
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string encode_rows(const Matrix& rows) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(rows.size()) * 4);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(rows(r, c)));
      for (int shift = 0; shift < 32; shift += 8) bytes.push_back(static_cast<char>((bits >> shift) & 0xFFU));
    }
  }
  return bytes;
}

Matrix decode_rows(const std::string& bytes, std::size_t row_count, std::size_t dim) {
  Matrix rows(static_cast<Eigen::Index>(row_count), static_cast<Eigen::Index>(dim));
  std::size_t offset = 0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset++])) << (8 * b);
      }
      const float value = std::bit_cast<float>(bits);
      if (!std::isfinite(value)) {
        throw DataError("non-finite value at row " + std::to_string(r) + ", column " + std::to_string(c));
      }
      rows(r, c) = static_cast<double>(value);
    }
  }
  return rows;
}

void write_artifact(const Manifest& m, const Matrix& rows, const fs::path& manifest_path) {
  if (m.row_count == 0) throw ShapeError("refusing to save an artifact with zero rows");
  ordered_json j;
  j["version"] = m.version;
  j["dim"] = m.dim;
  j["dtype"] = m.dtype;
  j["kind"] = m.kind;
  if (m.kind == "items") {
    j["items"] = m.items;
  } else {
    ordered_json factors = ordered_json::array();
    for (const auto& f : m.factors) factors.push_back({{"name", f.name}, {"values", f.values}});
    j["factors"] = std::move(factors);
  }
  j["data_file"] = m.data_file;
  j["row_count"] = m.row_count;
  j["normalized"] = m.normalized;
  if (m.kind == "model") j["weights"] = m.weights;

  const fs::path data_path = manifest_path.parent_path() / m.data_file;
  write_bytes(data_path, encode_rows(rows));
  write_bytes(manifest_path, j.dump(2) + "\n");
}

template <typename T>
T require(const ordered_json& j, const char* key, bool (ordered_json::*check)() const noexcept, const char* what) {
  if (!j.contains(key)) throw FormatError(std::string("manifest is missing '") + key + "'");
  const auto& v = j.at(key);
  if (!(v.*check)()) throw FormatError(std::string("manifest '") + key + "' must be " + what);
  return v.get<T>();
}

std::vector<std::string> string_list(const ordered_json& v, const std::string& what) {
  if (!v.is_array()) throw FormatError(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw FormatError(what + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

ConceptGrid grid_of(const Manifest& m) {
  try {
    return ConceptGrid(m.factors);
  } catch (const InvalidConcept& e) {
    throw FormatError(std::string("invalid factors: ") + e.what());
  }
}

}  // namespace

Manifest read_manifest(const fs::path& manifest_path) {
  const std::string text = read_bytes(manifest_path);
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + quoted(manifest_path) + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw FormatError("manifest " + quoted(manifest_path) + " must be a JSON object");

  Manifest m;
  m.version = require<int>(j, "version", &ordered_json::is_number_integer, "an integer");
  if (m.version != kFormatVersion) throw FormatError("unsupported manifest version " + std::to_string(m.version));
  m.dim = require<std::size_t>(j, "dim", &ordered_json::is_number_unsigned, "a positive integer");
  if (m.dim == 0) throw FormatError("manifest 'dim' must be positive");
  m.dtype = require<std::string>(j, "dtype", &ordered_json::is_string, "a string");
  if (m.dtype != "f32le") throw FormatError("unsupported dtype '" + m.dtype + "'");
  m.kind = require<std::string>(j, "kind", &ordered_json::is_string, "a string");
  if (m.kind != "grid" && m.kind != "items" && m.kind != "model") {
    throw FormatError("unknown artifact kind '" + m.kind + "'");
  }
  m.data_file = require<std::string>(j, "data_file", &ordered_json::is_string, "a string");
  if (m.data_file.empty() || fs::path(m.data_file).is_absolute()) {
    throw FormatError("manifest 'data_file' must be a non-empty relative path");
  }
  m.row_count = require<std::size_t>(j, "row_count", &ordered_json::is_number_unsigned, "a positive integer");
  if (m.row_count == 0) throw FormatError("manifest 'row_count' must be positive");
  m.normalized = require<bool>(j, "normalized", &ordered_json::is_boolean, "a boolean");

  std::size_t expected_rows = 0;
  if (m.kind == "items") {
    if (!j.contains("items")) throw FormatError("items manifest is missing 'items'");
    m.items = string_list(j.at("items"), "'items'");
    expected_rows = m.items.size();
  } else {
    if (!j.contains("factors") || !j.at("factors").is_array()) {
      throw FormatError("manifest is missing a 'factors' array");
    }
    for (const auto& f : j.at("factors")) {
      if (!f.is_object() || !f.contains("name") || !f.at("name").is_string() || !f.contains("values")) {
        throw FormatError("each factor needs a 'name' string and a 'values' array");
      }
      m.factors.push_back(Factor{f.at("name").get<std::string>(), string_list(f.at("values"), "factor values")});
    }
    const ConceptGrid grid = grid_of(m);
    if (m.kind == "grid") {
      expected_rows = grid.cell_count();
    } else {
      expected_rows = count_compositional_labels(grid).sum + 1;
      if (!j.contains("weights") || !j.at("weights").is_array() || j.at("weights").size() != grid.factor_count()) {
        throw FormatError("model manifest needs one 'weights' array per factor");
      }
      for (std::size_t i = 0; i < grid.factor_count(); ++i) {
        const auto& w = j.at("weights").at(i);
        if (!w.is_array() || w.size() != grid.factor_size(i)) {
          throw FormatError("model weights for factor " + std::to_string(i) + " have the wrong length");
        }
        std::vector<double> alpha;
        for (const auto& x : w) {
          if (!x.is_number()) throw FormatError("model weights must be numbers");
          alpha.push_back(x.get<double>());
        }
        m.weights.push_back(std::move(alpha));
      }
    }
  }
  if (m.row_count != expected_rows) {
    throw FormatError("manifest row_count " + std::to_string(m.row_count) + " does not match the expected " +
                      std::to_string(expected_rows));
  }
  return m;
}

void save(const EmbeddingTable& table, const fs::path& manifest_path) {
  Manifest m;
  m.dim = table.dim();
  if (table.has_grid()) {
    m.kind = "grid";
    m.factors = table.grid().factors();
  } else {
    m.kind = "items";
    m.items = table.items();
  }
  m.data_file = data_path_for(manifest_path).string();
  m.row_count = table.size();
  m.normalized = table.normalized();
  write_artifact(m, table.rows(), manifest_path);
}

void save(const IdealWordModel& model, const fs::path& manifest_path) {
  Manifest m;
  m.dim = model.dim();
  m.kind = "model";
  m.factors = model.grid().factors();
  m.data_file = data_path_for(manifest_path).string();
  m.row_count = count_compositional_labels(model.grid()).sum + 1;
  m.weights = model.weights().alpha();

  Matrix rows(static_cast<Eigen::Index>(m.row_count), static_cast<Eigen::Index>(m.dim));
  rows.row(0) = model.base().transpose();
  Eigen::Index r = 1;
  for (std::size_t i = 0; i < model.grid().factor_count(); ++i) {
    rows.middleRows(r, model.components(i).rows()) = model.components(i);
    r += model.components(i).rows();
  }
  write_artifact(m, rows, manifest_path);
}

Artifact load(const fs::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  const fs::path data_path = manifest_path.parent_path() / m.data_file;
  std::error_code ec;
  const auto size = fs::file_size(data_path, ec);
  if (ec) throw FormatError("data file " + quoted(data_path) + " is missing or unreadable");
  const std::uintmax_t expected = static_cast<std::uintmax_t>(m.row_count) * m.dim * 4;
  if (size != expected) {
    throw FormatError("data file " + quoted(data_path) + " holds " + std::to_string(size) + " bytes, expected " +
                      std::to_string(expected));
  }
  const std::string bytes = read_bytes(data_path);
  if (bytes.size() != expected) throw FormatError("short read from " + quoted(data_path));
  Matrix rows = decode_rows(bytes, m.row_count, m.dim);

  if (m.kind == "items") return EmbeddingTable::over_items(m.items, std::move(rows), m.normalized);
  ConceptGrid grid = grid_of(m);
  if (m.kind == "grid") return EmbeddingTable::over_grid(std::move(grid), std::move(rows), m.normalized);

  WeightScheme weights = [&] {
    try {
      return WeightScheme(grid, m.weights);
    } catch (const InvalidConcept& e) {
      throw FormatError(std::string("invalid model weights: ") + e.what());
    }
  }();
  Vector base = rows.row(0).transpose();
  std::vector<Matrix> components;
  Eigen::Index r = 1;
  for (std::size_t i = 0; i < grid.factor_count(); ++i) {
    const auto n = static_cast<Eigen::Index>(grid.factor_size(i));
    components.emplace_back(rows.middleRows(r, n));
    r += n;
  }
  return IdealWordModel(std::move(grid), std::move(weights), std::move(base), std::move(components));
}

EmbeddingTable load_table(const fs::path& manifest_path) {
  Artifact a = load(manifest_path);
  if (auto* t = std::get_if<EmbeddingTable>(&a)) return std::move(*t);
  throw FormatError(quoted(manifest_path) + " holds a model, expected an embedding table");
}

IdealWordModel load_model(const fs::path& manifest_path) {
  Artifact a = load(manifest_path);
  if (auto* m = std::get_if<IdealWordModel>(&a)) return std::move(*m);
  throw FormatError(quoted(manifest_path) + " holds an embedding table, expected a model");
}

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "decomposable") return SynthKind::kDecomposable;
  if (name == "noisy") return SynthKind::kNoisy;
  if (name == "mode_disentangled") return SynthKind::kModeDisentangled;
  throw InvalidConcept("unknown synth kind '" + name + "'");
}

SynthOutput synth(const ConceptGrid& grid, const SynthRequest& request) {
  if (request.dim == 0) throw ShapeError("synthetic tables need dim >= 1");
  if (!std::isfinite(request.noise) || request.noise < 0.0) throw InvalidConcept("noise must be finite and >= 0");
  Rng rng(request.seed);
  const auto d = static_cast<Eigen::Index>(request.dim);
  auto lattice = [&] { return std::round(rng.normal() * 1024.0) / 1024.0; };
  auto to_f32 = [](Matrix& m) { m = m.cast<float>().cast<double>(); };

  Vector base(d);
  for (Eigen::Index j = 0; j < d; ++j) base(j) = lattice();
  std::vector<Matrix> components;
  for (const auto& f : grid.factors()) {
    Matrix c(static_cast<Eigen::Index>(f.size()), d);
    for (Eigen::Index v = 0; v < c.rows(); ++v) {
      for (Eigen::Index j = 0; j < d; ++j) c(v, j) = lattice();
    }
    components.push_back(std::move(c));
  }

  Matrix rows(static_cast<Eigen::Index>(grid.cell_count()), d);
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const ValueTuple t = grid.tuple_of(cell);
    Eigen::RowVectorXd row = base.transpose();
    for (std::size_t i = 0; i < t.size(); ++i) row += components[i].row(static_cast<Eigen::Index>(t[i]));
    rows.row(static_cast<Eigen::Index>(cell)) = row;
  }

  if (request.kind != SynthKind::kDecomposable) {
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      for (Eigen::Index j = 0; j < d; ++j) rows(r, j) += request.noise * rng.normal();
    }
  }
  to_f32(rows);
  SynthOutput out{EmbeddingTable::over_grid(grid, std::move(rows)), std::nullopt};
  if (request.kind != SynthKind::kModeDisentangled) return out;

  if (request.image_count == 0) throw ShapeError("mode_disentangled fixtures need at least one image");
  Matrix images(static_cast<Eigen::Index>(request.image_count), d);
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  while (accepted < request.image_count) {
    if (attempts++ >= request.max_attempts) {
      throw GenerationError("only " + std::to_string(accepted) + " of " + std::to_string(request.image_count) +
                            " mode-disentangled images found in " + std::to_string(request.max_attempts) +
                            " attempts");
    }
    Matrix candidate(1, d);
    for (Eigen::Index j = 0; j < d; ++j) candidate(0, j) = rng.normal();
    to_f32(candidate);
    const JointEmbeddingModel probe(out.text, EmbeddingTable::over_items({"probe"}, candidate));
    bool ok = true;
    for (std::size_t i = 0; i < grid.factor_count() && ok; ++i) ok = mode_disentangled(probe, 0, i);
    if (!ok) continue;
    images.row(static_cast<Eigen::Index>(accepted++)) = candidate.row(0);
  }
  std::vector<std::string> names;
  for (std::size_t n = 0; n < request.image_count; ++n) {
    std::string id = std::to_string(n);
    names.push_back("img" + std::string(id.size() < 4 ? 4 - id.size() : 0, '0') + id);
  }
  out.images = EmbeddingTable::over_items(std::move(names), std::move(images));
  return out;
}

std::vector<fs::path> write_synth(const SynthOutput& output, const fs::path& prefix) {
  std::vector<fs::path> written;
  fs::path text_path = prefix;
  text_path += ".json";
  save(output.text, text_path);
  written.push_back(text_path);
  if (output.images) {
    fs::path image_path = prefix;
    image_path += "_images.json";
    save(*output.images, image_path);
    written.push_back(image_path);
  }
  return written;
}

}  // namespace iw
