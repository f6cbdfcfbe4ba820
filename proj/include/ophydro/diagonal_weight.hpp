#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace ophydro {

// Diagonal weight operator stored as log weights so strongly decaying or
// growing profiles stay representable. log_weights[i] belongs to site i + 1;
// -infinity encodes a hard zero.
struct DiagonalWeight {
  std::vector<double> log_weights;

  explicit DiagonalWeight(int size = 0)
      : log_weights(static_cast<std::size_t>(size), 0.0) {}

  int size() const { return static_cast<int>(log_weights.size()); }

  double weight(int i) const { return std::exp(log_weights[i]); }

  bool strictly_positive() const {
    for (double lw : log_weights)
      if (lw == -std::numeric_limits<double>::infinity()) return false;
    return true;
  }
};

}  // namespace ophydro
