#include "omsub/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "omsub/errors.hpp"

namespace omsub {

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string render_csv(const Table& table) {
  std::string out;
  for (const std::string& line : table.metadata) {
    out += "# ";
    out += line;
    out += '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv_file(const Table& table, const std::filesystem::path& path) {
  const std::string body = render_csv(table);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
    if (!stream) {
      throw Error("write_csv_file: cannot open " + tmp.string());
    }
    stream.write(body.data(), static_cast<std::streamsize>(body.size()));
    stream.flush();
    if (!stream) {
      stream.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write_csv_file: write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("write_csv_file: cannot rename into " + path.string());
  }
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace omsub
