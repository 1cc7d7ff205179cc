#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace conman {

using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;
};

// RFC-4180 style: fields containing ',', '"' or newlines are quoted.
std::string render_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

}  // namespace conman
