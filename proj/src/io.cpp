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
#include "pqdvqc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "pqdvqc/error.hpp"

namespace pqdvqc {
namespace {

std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double parse_double(const std::string& s, const fs::path& path,
                    std::size_t line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": invalid number '" + s + "'");
  }
  return v;
}

int parse_code(const std::string& s, const fs::path& path, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0 ||
      v >= kNumDisturbanceClasses) {
    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                     ": invalid label '" + s + "'");
  }
  return v;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) throw ParseError(path.string() + ": empty file");
  return lines;
}

}  // namespace

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p += ".json";
  return p;
}

void write_text_atomic(const fs::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() +
                  "': " + ec.message());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string> split_csv_line(std::string_view line,
                                        std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty() || was_quoted) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": stray quote in field " + std::to_string(fields.size() + 1));
      }
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += c;
    }
  }
  if (quoted) {
    throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(cur));
  return fields;
}

void save_dataset(const Dataset& d, const fs::path& csv,
                  const nlohmann::json& extra_meta) {
  const std::size_t n = d.spec.sample_count();
  std::string out = "label,param_json";
  for (std::size_t k = 0; k < n; ++k) out += ",s" + std::to_string(k);
  out += '\n';
  for (const auto& w : d.waveforms) {
    if (w.samples.size() != n) throw ArgumentError("waveform length mismatch");
    out += std::to_string(static_cast<int>(w.label));
    out += ',';
    out += csv_quote(nlohmann::json(w.params).dump());
    for (double v : w.samples) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text_atomic(csv, out);

  nlohmann::json meta = extra_meta.is_object() ? extra_meta : nlohmann::json::object();
  meta["spec"] = d.spec;
  meta["seed"] = d.spec.rng_seed;
  meta["snr_db"] = d.snr_db ? nlohmann::json(*d.snr_db) : nlohmann::json(nullptr);
  meta["rows"] = d.waveforms.size();
  write_json(sidecar_path(csv), meta);
}

Dataset load_dataset(const fs::path& csv) {
  const auto meta = read_json(sidecar_path(csv));
  Dataset d;
  try {
    meta.at("spec").get_to(d.spec);
    if (meta.contains("snr_db") && !meta["snr_db"].is_null()) {
      d.snr_db = meta["snr_db"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(sidecar_path(csv).string() + ": " + e.what());
  }
  try {
    d.spec.validate();
  } catch (const ConfigError& e) {
    throw ParseError(sidecar_path(csv).string() + ": " + e.what());
  }
  const std::size_t n = d.spec.sample_count();
  const auto lines = read_lines(csv);
  const auto header = split_csv_line(lines[0], 1);
  if (header.size() != n + 2 || header[0] != "label" || header[1] != "param_json") {
    throw ParseError(csv.string() + ":1: header does not match " +
                     std::to_string(n) + "-sample waveforms");
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    auto fields = split_csv_line(lines[li], line_no);
    if (fields.size() != n + 2) {
      throw ParseError(csv.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(n + 2) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Waveform w;
    w.spec = d.spec;
    w.label = static_cast<DisturbanceClass>(parse_code(fields[0], csv, line_no));
    try {
      nlohmann::json::parse(fields[1]).get_to(w.params);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(csv.string() + ":" + std::to_string(line_no) +
                       ": bad param_json: " + e.what());
    }
    w.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      w.samples[k] = parse_double(fields[k + 2], csv, line_no);
    }
    d.waveforms.push_back(std::move(w));
  }
  return d;
}

void save_features(const FeatureTable& t, const fs::path& csv) {
  std::string out = "label";
  for (std::size_t i = 1; i <= kNumFeatures; ++i) out += ",f" + std::to_string(i);
  out += '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += std::to_string(t.codes[r]);
    for (double v : t.rows[r]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  write_text_atomic(csv, out);
  write_json(sidecar_path(csv),
             {{"settings", t.settings},
              {"sample_rate_hz", t.sample_rate_hz},
              {"fundamental_hz", t.fundamental_hz},
              {"highest_harmonic", t.highest_harmonic},
              {"truncated", t.truncated},
              {"edge_exclusion_periods", t.settings.edge_periods},
              {"rows", t.rows.size()}});
}

FeatureTable load_features(const fs::path& csv) {
  FeatureTable t;
  const auto side = sidecar_path(csv);
  if (fs::exists(side)) {
    try {
      const auto meta = read_json(side);
      meta.at("settings").get_to(t.settings);
      t.sample_rate_hz = meta.value("sample_rate_hz", 0.0);
      t.fundamental_hz = meta.value("fundamental_hz", 0.0);
      t.highest_harmonic = meta.value("highest_harmonic", 0);
      t.truncated = meta.value("truncated", false);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(side.string() + ": " + e.what());
    }
  }
  const auto lines = read_lines(csv);
  const auto header = split_csv_line(lines[0], 1);
  if (header.size() != kNumFeatures + 1 || header[0] != "label") {
    throw ParseError(csv.string() + ":1: expected header label,f1,...,f9");
  }
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    auto fields = split_csv_line(lines[li], line_no);
    if (fields.size() != kNumFeatures + 1) {
      throw ParseError(csv.string() + ":" + std::to_string(line_no) +
                       ": expected 10 fields, got " + std::to_string(fields.size()));
    }
    t.codes.push_back(parse_code(fields[0], csv, line_no));
    FeatureVector f{};
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      f[i] = parse_double(fields[i + 1], csv, line_no);
    }
    t.rows.push_back(f);
  }
  return t;
}

void save_checkpoint(const Checkpoint& c, const fs::path& path) {
  write_json(path, checkpoint_to_json(c));
}

Checkpoint load_checkpoint(const fs::path& path) {
  return checkpoint_from_json(read_json(path));
}

}  // namespace pqdvqc
