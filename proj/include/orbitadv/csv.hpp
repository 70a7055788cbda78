#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace orbitadv {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

// Buffered CSV emitter: UTF-8, comma separators, one header row.  The whole
// file is built in memory and written in one shot so identical inputs give
// byte-identical files.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& cells);

  const std::string& content() const { return content_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string content_;
};

// FNV-1a 64-bit hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace orbitadv
