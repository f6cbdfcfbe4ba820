#include "ophydro/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ophydro/errors.hpp"

namespace ophydro {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw validation_error("CsvTable: row width does not match header");
  rows.push_back(std::move(cells));
}

std::string render_csv(const CsvTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot open for writing: " + path);
  f << text;
  if (!f) throw validation_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw validation_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace ophydro
