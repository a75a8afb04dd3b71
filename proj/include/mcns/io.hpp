#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcns/series.hpp"
#include "mcns/structure.hpp"

namespace mcns::io {

inline constexpr int kFormatVersion = 1;

std::string read_file(const std::string& path);
// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

// Tab if the first line has one, else comma, else runs of whitespace (' ').
char detect_delimiter(const std::string& first_line);

// UCR-style rows: label token, then samples. Labels are remapped to
// contiguous ids in ascending numeric (else lexicographic) token order.
Dataset parse_ucr(const std::string& text, std::optional<char> delimiter = std::nullopt);
Dataset load_ucr(const std::string& path, std::optional<char> delimiter = std::nullopt);
std::string format_ucr(const Dataset& dataset, char delimiter = ',');
void write_ucr(const std::string& path, const Dataset& dataset, char delimiter = ',');

std::string format_double(double v);

std::string export_structure(const CausalStructure& structure);
CausalStructure import_structure(const std::string& json_text);

// nn-bridge contract: per-series step strengths plus the edge strength map.
std::string export_strengths(const CausalStructure& structure,
                             const std::vector<std::pair<std::string, std::vector<double>>>& zeta);

std::string export_dot(const CausalStructure& structure);
// Drops factors whose bit is 0 in `present`.
std::string export_dot(const CausalStructure& structure, const std::vector<std::uint8_t>& present);

RunConfig parse_config(const std::string& json_text);
std::string config_json(const RunConfig& config);

// "0.5L:0.5L:5L", "1L", "25", "10:10:50" or comma lists of those.
// Multiples of L are rounded to the nearest integer.
std::vector<std::size_t> parse_grid(const std::string& text, std::optional<std::size_t> unit = std::nullopt);

std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace mcns::io
