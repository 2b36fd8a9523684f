#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace ergo {

/// Solves the dense square system A x = b by Gaussian elimination with
/// partial pivoting. Returns nullopt when the system is singular (pivot
/// magnitude below `pivot_tol`). Pivot ties resolve to the lowest row index,
/// so the routine is deterministic.
inline std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a,
                                                       std::vector<double> b,
                                                       double pivot_tol = 1e-12) {
  const int n = static_cast<int>(a.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[col][col]);
    for (int r = col + 1; r < n; ++r) {
      double cand = std::abs(a[r][col]);
      if (cand > best) {
        best = cand;
        pivot = r;
      }
    }
    if (best < pivot_tol) return std::nullopt;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(b[pivot], b[col]);
    }
    const double inv = 1.0 / a[col][col];
    for (int r = col + 1; r < n; ++r) {
      const double factor = a[r][col] * inv;
      if (factor == 0.0) continue;
      a[r][col] = 0.0;
      for (int c = col + 1; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

}  // namespace ergo
