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

// On-disk format shared with external exporters.
//
// An artifact is a JSON manifest plus a raw data file next to it. The data
// file is row-major 32-bit little-endian floats: grid rows in lexicographic
// cell order, item rows in item order, or for models [u_0; factor-1
// components; ...; factor-k components]. Manifest keys, in order:
//
//   version (1), dim, dtype ("f32le"), kind ("grid" | "items" | "model"),
//   factors | items, data_file, row_count, normalized[, weights]
//
// `weights` is written for models only and holds the per-factor alpha.

#ifndef IDEALWORDS_STORE_HPP_
#define IDEALWORDS_STORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "idealwords/concept_grid.hpp"
#include "idealwords/decomposition.hpp"
#include "idealwords/embedding_table.hpp"

namespace iw {

inline constexpr int kFormatVersion = 1;

struct Manifest {
  int version = kFormatVersion;
  std::size_t dim = 0;
  std::string dtype = "f32le";
  std::string kind;
  std::vector<Factor> factors;     // grid and model
  std::vector<std::string> items;  // items
  std::string data_file;
  std::size_t row_count = 0;
  bool normalized = false;
  std::vector<std::vector<double>> weights;  // model
};

using Artifact = std::variant<EmbeddingTable, IdealWordModel>;

// Parses and validates a manifest without touching the data file.
// FormatError on any structural problem, IoError if unreadable.
Manifest read_manifest(const std::filesystem::path& manifest_path);

// Writes `<stem>.json`-style manifest at `manifest_path` and the data file
// `<stem>.bin` beside it. IoError with the path on failure.
void save(const EmbeddingTable& table, const std::filesystem::path& manifest_path);
void save(const IdealWordModel& model, const std::filesystem::path& manifest_path);

// Validates every manifest invariant and the data file length before
// decoding. FormatError for structure, DataError for NaN/Inf values.
Artifact load(const std::filesystem::path& manifest_path);
EmbeddingTable load_table(const std::filesystem::path& manifest_path);
IdealWordModel load_model(const std::filesystem::path& manifest_path);

enum class SynthKind { kDecomposable, kNoisy, kModeDisentangled };

// Parses "decomposable" | "noisy" | "mode_disentangled" (InvalidConcept otherwise).
SynthKind parse_synth_kind(const std::string& name);

struct SynthRequest {
  SynthKind kind = SynthKind::kDecomposable;
  std::size_t dim = 8;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::size_t image_count = 8;      // mode_disentangled only
  std::size_t max_attempts = 100000;
};

struct SynthOutput {
  EmbeddingTable text;
  std::optional<EmbeddingTable> images;
};

// Deterministic for a fixed request. Components are drawn on a 2^-10 lattice
// so the decomposable table survives f32 storage exactly; all returned
// values are f32-representable. The noisy kind adds noise * N(0, 1) per
// entry (noise 0 reproduces the decomposable table). The mode_disentangled
// kind rejection-samples images for which every factor is mode-disentangled
// and throws GenerationError after max_attempts draws.
SynthOutput synth(const ConceptGrid& grid, const SynthRequest& request);

// Writes `<prefix>.json` and, when present, `<prefix>_images.json`.
std::vector<std::filesystem::path> write_synth(const SynthOutput& output, const std::filesystem::path& prefix);

}  // namespace iw

#endif  // IDEALWORDS_STORE_HPP_
