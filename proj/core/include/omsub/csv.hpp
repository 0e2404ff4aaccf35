#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace omsub {

// A deterministic numeric table: '#'-prefixed metadata lines (no timestamps,
// so identical runs render byte-identically), one column-name row, and
// numeric rows printed with shortest round-trip formatting.
struct Table {
  std::vector<std::string> metadata;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

std::string render_csv(const Table& table);

// Writes via a temporary file in the target directory and renames into
// place, so a failed run never leaves partial output behind.
void write_csv_file(const Table& table, const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace omsub
