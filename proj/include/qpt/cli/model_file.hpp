/*
 * Copyright 2026 The qpu-time Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "qpt/gbdt.hpp"
#include "qpt/heuristic.hpp"
#include "qpt/preprocess.hpp"

namespace qpt::cli {

inline constexpr int kModelFileVersion = 1;

struct ModelMetadata {
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  Timestamp cutoff;
  std::string config_hash;
  Timestamp created_at;  // epoch under --reproducible

  bool operator==(const ModelMetadata&) const = default;
};

struct ModelFile {
  int version = kModelFileVersion;
  FittedPipeline pipeline;
  GbdtModel gbdt;
  std::optional<HeuristicCoefficients> heuristic;
  ModelMetadata metadata;

  // Throws DataError when the pipeline and model layouts differ.
  void validate() const;
  bool operator==(const ModelFile&) const = default;
};

// "fnv1a64:" followed by 16 hex digits of the FNV-1a hash of the compact dump.
std::string config_hash(const nlohmann::ordered_json& config);

nlohmann::ordered_json model_file_to_json(const ModelFile& file);
// Throws DataError on an unknown version or inconsistent sections.
ModelFile model_file_from_json(const nlohmann::json& j);

void save_model_file(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model_file(const std::filesystem::path& path);

}  // namespace qpt::cli
