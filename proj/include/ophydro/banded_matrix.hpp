#pragma once

#include <map>
#include <vector>

#include "json.hpp"

namespace ophydro {

// Square banded matrix stored by diagonals. Band offset o = column - row, so
// o = -1 is the subdiagonal. Entry k of band o sits at
// (row, col) = (k + max(-o, 0), k + max(o, 0)); the band length is size - |o|.
// Indices are 0-based; builders that speak of lattice sites use site x = row + 1.
class BandedMatrix {
 public:
  explicit BandedMatrix(int size, bool stochastic = false);

  int size() const { return size_; }

  // True when the builder promises column-stochasticity (columns sum to 1,
  // entries nonnegative). Sub-stochastic operators leave this false.
  bool stochastic() const { return stochastic_; }
  void set_stochastic(bool flag) { stochastic_ = flag; }

  // Creates the band (zero filled) if absent.
  std::vector<double>& band(int offset);
  const std::vector<double>* find_band(int offset) const;
  std::vector<int> offsets() const;

  double at(int row, int col) const;
  void set(int row, int col, double value);

  int lower_bandwidth() const;  // largest k with a band at offset -k
  int upper_bandwidth() const;

  void apply(const double* x, double* y) const;  // y = A x
  std::vector<double> apply(const std::vector<double>& x) const;

  double column_sum(int col) const;
  bool column_stochastic(int col, double tol) const;
  bool columns_stochastic(double tol) const;

  std::vector<double> to_dense() const;  // row-major size*size, small sizes only

  nlohmann::json to_json() const;
  static BandedMatrix from_json(const nlohmann::json& j);

 private:
  void check_offset(int offset) const;

  int size_;
  bool stochastic_;
  std::map<int, std::vector<double>> bands_;
};

}  // namespace ophydro
