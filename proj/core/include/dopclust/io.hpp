#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dopclust/common.hpp"

namespace dopclust::io {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

// Parses a full field as a double; returns false on trailing garbage or empty input.
bool parse_double(std::string_view field, double& out);
bool parse_int(std::string_view field, long long& out);

std::vector<std::string_view> split_csv_line(std::string_view line);

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view content);

// CSV with the given header names (must match matrix columns).
std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& header);

}  // namespace dopclust::io
