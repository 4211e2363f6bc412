/*******************************************************************************
 * Copyright (c) 2026 The qecdecay Authors.                                    *
 * All rights reserved.                                                        *
 *                                                                             *
 * This source code and the accompanying materials are made available under    *
 * the terms of the Apache License 2.0 which accompanies this distribution.    *
 ******************************************************************************/
#pragma once

#include "qecdecay/metrics.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace qecdecay::cli {

inline std::string sha256_hex(const std::string &data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct FileEntry {
  std::string path; // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct FitRecord {
  std::string label;
  metrics::PowerLawFit fit;
};

struct RunManifest {
  std::string scenario; // serialized, defaults included
  std::vector<std::uint64_t> seeds;
  std::string version;
  double duration_seconds = 0.0;
  std::string output_dir;
  std::vector<FileEntry> files;
  std::size_t svg_dropped_points = 0;
  std::vector<FitRecord> fits;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["scenario"] = scenario;
    j["seeds"] = seeds;
    j["version"] = version;
    j["duration_seconds"] = duration_seconds;
    j["output_dir"] = output_dir;
    j["svg_dropped_points"] = svg_dropped_points;
    j["files"] = nlohmann::json::array();
    for (const auto &f : files)
      j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    j["fits"] = nlohmann::json::array();
    for (const auto &r : fits)
      j["fits"].push_back({{"label", r.label},
                           {"exponent", r.fit.exponent},
                           {"log_coefficient", r.fit.log_coefficient},
                           {"window_min", r.fit.t_min},
                           {"window_max", r.fit.t_max},
                           {"residual", r.fit.max_residual}});
    return j;
  }
};

/// Files listed in the manifest that are missing or whose content no longer
/// matches the recorded hash.
inline std::vector<std::string> verify_manifest(const RunManifest &m) {
  std::vector<std::string> drift;
  for (const auto &f : m.files) {
    const auto p = std::filesystem::path(m.output_dir) / f.path;
    if (!std::filesystem::exists(p) || sha256_hex(read_file(p)) != f.sha256)
      drift.push_back(f.path);
  }
  return drift;
}

} // namespace qecdecay::cli
