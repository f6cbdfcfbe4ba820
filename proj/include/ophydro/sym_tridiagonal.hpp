#pragma once

#include <vector>

namespace ophydro {

// Symmetric tridiagonal matrix: diag has length L, off has length L - 1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }

  std::vector<double> apply(const std::vector<double>& x) const {
    const int n = size();
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i) {
      y[i] = diag[i] * x[i];
      if (i > 0) y[i] += off[i - 1] * x[i - 1];
      if (i + 1 < n) y[i] += off[i] * x[i + 1];
    }
    return y;
  }
};

}  // namespace ophydro
