#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ophydro/banded_matrix.hpp"
#include "ophydro/sym_tridiagonal.hpp"

namespace ophydro_test {

inline Eigen::MatrixXd dense_from_tridiag(const ophydro::SymTridiagonal& m) {
  const int n = m.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = m.diag[i];
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = m.off[i];
  return a;
}

inline Eigen::MatrixXd dense_from_banded(const ophydro::BandedMatrix& m) {
  const int n = m.size();
  const std::vector<double> flat = m.to_dense();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = flat[static_cast<std::size_t>(i) * n + j];
  return a;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

// Fresh empty directory under the system temp root; wiped if a previous run
// left it behind.
inline std::string temp_run_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ophydro_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

struct CsvFile {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw std::runtime_error("csv column not found: " + name);
  }

  double number(std::size_t row, const std::string& name) const {
    return std::stod(rows.at(row).at(column(name)));
  }
};

inline CsvFile load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CsvFile out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (header) {
      out.columns = cells;
      header = false;
    } else {
      out.rows.push_back(cells);
    }
  }
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ophydro_test
