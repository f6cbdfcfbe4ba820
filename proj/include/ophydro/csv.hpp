#pragma once

#include <string>
#include <vector>

namespace ophydro {

// shortest round-trip decimal form, '.' separator, locale independent
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // row cells must match the header width
  void add_row(std::vector<std::string> cells);
};

std::string render_csv(const CsvTable& table);

void write_text_file(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace ophydro
