#include "ophydro/banded_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ophydro/errors.hpp"

namespace ophydro {

BandedMatrix::BandedMatrix(int size, bool stochastic)
    : size_(size), stochastic_(stochastic) {
  if (size < 1) throw validation_error("BandedMatrix: size must be >= 1");
}

void BandedMatrix::check_offset(int offset) const {
  if (std::abs(offset) >= size_)
    throw validation_error("BandedMatrix: band offset out of range");
}

std::vector<double>& BandedMatrix::band(int offset) {
  check_offset(offset);
  auto it = bands_.find(offset);
  if (it == bands_.end())
    it = bands_.emplace(offset, std::vector<double>(size_ - std::abs(offset), 0.0)).first;
  return it->second;
}

const std::vector<double>* BandedMatrix::find_band(int offset) const {
  auto it = bands_.find(offset);
  return it == bands_.end() ? nullptr : &it->second;
}

std::vector<int> BandedMatrix::offsets() const {
  std::vector<int> out;
  out.reserve(bands_.size());
  for (const auto& [o, _] : bands_) out.push_back(o);
  return out;
}

double BandedMatrix::at(int row, int col) const {
  if (row < 0 || row >= size_ || col < 0 || col >= size_)
    throw validation_error("BandedMatrix::at: index out of range");
  const auto* b = find_band(col - row);
  return b ? (*b)[std::min(row, col)] : 0.0;
}

void BandedMatrix::set(int row, int col, double value) {
  if (row < 0 || row >= size_ || col < 0 || col >= size_)
    throw validation_error("BandedMatrix::set: index out of range");
  band(col - row)[std::min(row, col)] = value;
}

int BandedMatrix::lower_bandwidth() const {
  int lb = 0;
  for (const auto& [o, _] : bands_)
    if (o < 0) lb = std::max(lb, -o);
  return lb;
}

int BandedMatrix::upper_bandwidth() const {
  int ub = 0;
  for (const auto& [o, _] : bands_)
    if (o > 0) ub = std::max(ub, o);
  return ub;
}

void BandedMatrix::apply(const double* x, double* y) const {
  std::fill(y, y + size_, 0.0);
  for (const auto& [o, b] : bands_) {
    const int row0 = std::max(-o, 0);
    const int col0 = std::max(o, 0);
    const int len = static_cast<int>(b.size());
    for (int k = 0; k < len; ++k) y[row0 + k] += b[k] * x[col0 + k];
  }
}

std::vector<double> BandedMatrix::apply(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != size_)
    throw validation_error("BandedMatrix::apply: vector length mismatch");
  std::vector<double> y(size_);
  apply(x.data(), y.data());
  return y;
}

double BandedMatrix::column_sum(int col) const {
  double s = 0.0;
  for (const auto& [o, b] : bands_) {
    int row = col - o;
    if (row >= 0 && row < size_) s += b[std::min(row, col)];
  }
  return s;
}

bool BandedMatrix::column_stochastic(int col, double tol) const {
  for (const auto& [o, b] : bands_) {
    int row = col - o;
    if (row >= 0 && row < size_ && b[std::min(row, col)] < 0.0) return false;
  }
  return std::fabs(column_sum(col) - 1.0) <= tol;
}

bool BandedMatrix::columns_stochastic(double tol) const {
  for (int col = 0; col < size_; ++col)
    if (!column_stochastic(col, tol)) return false;
  return true;
}

std::vector<double> BandedMatrix::to_dense() const {
  std::vector<double> dense(static_cast<std::size_t>(size_) * size_, 0.0);
  for (const auto& [o, b] : bands_) {
    const int row0 = std::max(-o, 0);
    const int col0 = std::max(o, 0);
    for (int k = 0; k < static_cast<int>(b.size()); ++k)
      dense[static_cast<std::size_t>(row0 + k) * size_ + (col0 + k)] = b[k];
  }
  return dense;
}

nlohmann::json BandedMatrix::to_json() const {
  nlohmann::json bands = nlohmann::json::object();
  for (const auto& [o, b] : bands_) bands[std::to_string(o)] = b;
  return {{"size", size_}, {"stochastic", stochastic_}, {"bands", bands}};
}

BandedMatrix BandedMatrix::from_json(const nlohmann::json& j) {
  BandedMatrix m(j.at("size").get<int>(), j.at("stochastic").get<bool>());
  for (const auto& [key, value] : j.at("bands").items()) {
    int offset = std::stoi(key);
    auto entries = value.get<std::vector<double>>();
    if (entries.size() != static_cast<std::size_t>(m.size() - std::abs(offset)))
      throw validation_error("BandedMatrix::from_json: band length mismatch");
    m.band(offset) = std::move(entries);
  }
  return m;
}

}  // namespace ophydro
