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

#include "qpt/cli/model_file.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

#include "qpt/errors.hpp"

namespace qpt::cli {

using nlohmann::json;
using nlohmann::ordered_json;

void ModelFile::validate() const {
  if (version != kModelFileVersion) {
    throw DataError("unsupported model file version " + std::to_string(version));
  }
  if (pipeline.layout != gbdt.layout) throw DataError("pipeline and model layouts differ");
}

std::string config_hash(const ordered_json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered_json model_file_to_json(const ModelFile& f) {
  ordered_json j;
  j["format"] = "qpt-model";
  j["version"] = f.version;
  j["metadata"] = {{"train_count", f.metadata.train_count},
                   {"test_count", f.metadata.test_count},
                   {"cutoff", format_rfc3339(f.metadata.cutoff)},
                   {"config_hash", f.metadata.config_hash},
                   {"created_at", format_rfc3339(f.metadata.created_at)}};
  j["pipeline"] = pipeline_to_json(f.pipeline);
  j["gbdt"] = model_to_json(f.gbdt);
  j["heuristic"] = f.heuristic ? heuristic_to_json(*f.heuristic) : ordered_json(nullptr);
  return j;
}

ModelFile model_file_from_json(const json& j) {
  ModelFile f;
  try {
    if (j.at("format").get<std::string>() != "qpt-model") throw DataError("not a qpt model file");
    f.version = j.at("version").get<int>();
    if (f.version != kModelFileVersion) {
      throw DataError("unsupported model file version " + std::to_string(f.version));
    }
    const json& m = j.at("metadata");
    f.metadata.train_count = m.at("train_count").get<std::size_t>();
    f.metadata.test_count = m.at("test_count").get<std::size_t>();
    f.metadata.cutoff = parse_rfc3339(m.at("cutoff").get<std::string>());
    f.metadata.config_hash = m.at("config_hash").get<std::string>();
    f.metadata.created_at = parse_rfc3339(m.at("created_at").get<std::string>());
    f.pipeline = pipeline_from_json(j.at("pipeline"));
    f.gbdt = model_from_json(j.at("gbdt"));
    if (!j.at("heuristic").is_null()) f.heuristic = heuristic_from_json(j.at("heuristic"));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
  f.validate();
  return f;
}

void save_model_file(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model file '" + path.string() + "'");
  out << model_file_to_json(file).dump(1) << '\n';
  if (!out) throw ConfigError("failed writing model file '" + path.string() + "'");
}

ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("model file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return model_file_from_json(j);
}

}  // namespace qpt::cli
