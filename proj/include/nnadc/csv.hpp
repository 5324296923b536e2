#pragma once

// RFC-4180 CSV with LF line endings. Numbers are written in their shortest
// round-trip form so re-runs produce byte-identical files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace nnadc {

std::string csv_number(double v);
std::string csv_number(std::uint64_t v);
std::string csv_number(int v);

/// Quotes a field when it holds a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

using CsvTable = std::vector<std::vector<std::string>>;

/// Parses RFC-4180 text (CRLF or LF). Throws std::invalid_argument on an
/// unterminated quote.
CsvTable parse_csv(const std::string& text);

} // namespace nnadc
