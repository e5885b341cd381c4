#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace assin {

std::string read_file(const std::filesystem::path& path);

// Writes `contents` to a sibling temporary file and renames it over `path`,
// so readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

// Fixed-point with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

}  // namespace assin
