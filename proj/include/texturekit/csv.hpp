#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tk {

// Minimal CSV: comma separator, double-quote quoting for fields containing
// commas/quotes/newlines. Enough for the artifact formats; not a general
// RFC 4180 reader.
using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

std::string csv_escape(const std::string& field);

}  // namespace tk
