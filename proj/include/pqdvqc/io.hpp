/* Copyright 2026 The pqdvqc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

// File formats:
//   waveforms  CSV  label,param_json,s0,...,s{N-1}   + <file>.json sidecar
//   features   CSV  label,f1,...,f9                   + <file>.json sidecar
//   checkpoint JSON (see Checkpoint)
// Labels are disturbance codes 0..10. Every writer goes through a temporary
// file and a rename.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pqdvqc/qnn.hpp"
#include "pqdvqc/signal.hpp"
#include "pqdvqc/stransform.hpp"

namespace pqdvqc {

namespace fs = std::filesystem;

struct FeatureTable {
  std::vector<int> codes;  // disturbance code per row
  std::vector<FeatureVector> rows;
  FeatureSettings settings;
  double sample_rate_hz = 0.0;
  double fundamental_hz = 0.0;
  int highest_harmonic = 0;
  bool truncated = false;

  std::size_t size() const { return rows.size(); }
};

fs::path sidecar_path(const fs::path& csv);

void write_text_atomic(const fs::path& path, std::string_view text);
std::string read_text(const fs::path& path);

void write_json(const fs::path& path, const nlohmann::json& j);
nlohmann::json read_json(const fs::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Splits one CSV record; fields may be double-quoted with "" escapes.
std::vector<std::string> split_csv_line(std::string_view line,
                                        std::size_t line_no);

void save_dataset(const Dataset& d, const fs::path& csv,
                  const nlohmann::json& extra_meta = {});
Dataset load_dataset(const fs::path& csv);

void save_features(const FeatureTable& t, const fs::path& csv);
FeatureTable load_features(const fs::path& csv);

void save_checkpoint(const Checkpoint& c, const fs::path& path);
Checkpoint load_checkpoint(const fs::path& path);

}  // namespace pqdvqc
