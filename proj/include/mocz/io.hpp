// SPDX-License-Identifier: Apache-2.0
//
// File formats: sequence CSV ("re,im" per row), JSON configuration and
// result records, and atomic file replacement.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "mocz/simulator.hpp"

namespace mocz {

void write_sequence_csv(std::ostream& os, std::span<const cdouble> x);
std::string sequence_csv(std::span<const cdouble> x);
// Accepts an optional "re,im" header, blank lines and '#' comments.
CVec read_sequence_csv(std::istream& is);
CVec read_sequence_csv(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

// Throws ConfigError on unknown or ill-typed fields.
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& cfg);
SimConfig load_sim_config(const std::filesystem::path& path);

nlohmann::json to_json(const EstimateReport& r);
nlohmann::json to_json(const BerResult& r);
nlohmann::json to_json(const RadarResult& r);
nlohmann::json to_json(const CfarCalibration& c);

std::string ber_csv(const BerResult& r);
std::string radar_csv(const RadarResult& r);

// Gnuplot-friendly "lag bin magnitude" rows, blank line between lags.
std::string ambiguity_grid(const AmbiguityMap& af);

} // namespace mocz
