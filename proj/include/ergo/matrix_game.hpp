#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ergo/game.hpp"
#include "ergo/linalg.hpp"

namespace ergo {

/// Constraints with slack below this are classified as tight.
inline constexpr double kSlackTolerance = 1e-9;
/// Bound on the mutual-guarantee certificate residual of a solution.
inline constexpr double kCertTolerance = 1e-7;

using Matrix = std::vector<std::vector<double>>;

/// Minimax value and optimal mixed strategies of a zero-sum matrix game.
/// The row player maximizes, the column player minimizes. tight_rows /
/// tight_cols list the constraints that bind at the optimum.
struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
  std::vector<int> tight_rows;
  std::vector<int> tight_cols;
  bool refined = false;
};

namespace detail {

inline void check_matrix(const Matrix& m) {
  if (m.empty() || m[0].empty()) throw std::invalid_argument("matrix must be at least 1x1");
  const std::size_t cols = m[0].size();
  for (const auto& row : m) {
    if (row.size() != cols) throw std::invalid_argument("matrix rows have unequal lengths");
    for (double x : row) {
      if (!std::isfinite(x)) throw std::invalid_argument("matrix entries must be finite");
    }
  }
}

/// Payoff of the row mix against each column.
inline std::vector<double> row_payoffs(const Matrix& m, const std::vector<double>& x) {
  const int r = static_cast<int>(m.size()), c = static_cast<int>(m[0].size());
  std::vector<double> out(c, 0.0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) out[j] += x[i] * m[i][j];
  }
  return out;
}

/// Payoff of the column mix against each row.
inline std::vector<double> col_payoffs(const Matrix& m, const std::vector<double>& y) {
  const int r = static_cast<int>(m.size()), c = static_cast<int>(m[0].size());
  std::vector<double> out(r, 0.0);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) out[i] += m[i][j] * y[j];
  }
  return out;
}

struct MatrixLp {
  std::vector<double> w;      // structural solution
  std::vector<double> duals;  // one per constraint row
  double objective = 0.0;
};

/// Primal simplex for: max 1'w  s.t.  A w <= 1, w >= 0, with all entries of
/// A positive. Entering and leaving variables follow Bland's rule (lowest
/// index), so the pivot sequence is deterministic and cannot cycle.
inline MatrixLp solve_positive_matrix_lp(const Matrix& a) {
  const int r = static_cast<int>(a.size());
  const int c = static_cast<int>(a[0].size());
  const int cols = c + r + 1;
  const double tol = 1e-11;

  std::vector<std::vector<double>> t(r + 1, std::vector<double>(cols, 0.0));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) t[i][j] = a[i][j];
    t[i][c + i] = 1.0;
    t[i][cols - 1] = 1.0;
  }
  for (int j = 0; j < c; ++j) t[r][j] = -1.0;

  std::vector<int> basis(r);
  for (int i = 0; i < r; ++i) basis[i] = c + i;

  const long max_pivots = 2000L * (r + c) + 10000L;
  for (long iter = 0;; ++iter) {
    if (iter > max_pivots) throw SolveError("matrix-game simplex did not terminate");
    int enter = -1;
    for (int j = 0; j < c + r; ++j) {
      if (t[r][j] < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < r; ++i) {
      if (t[i][enter] > tol) {
        const double ratio = t[i][cols - 1] / t[i][enter];
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) throw SolveError("matrix-game LP unbounded");

    const double inv = 1.0 / t[leave][enter];
    for (int j = 0; j < cols; ++j) t[leave][j] *= inv;
    t[leave][enter] = 1.0;
    for (int i = 0; i <= r; ++i) {
      if (i == leave) continue;
      const double factor = t[i][enter];
      if (factor == 0.0) continue;
      for (int j = 0; j < cols; ++j) t[i][j] -= factor * t[leave][j];
      t[i][enter] = 0.0;
    }
    basis[leave] = enter;
  }

  MatrixLp out;
  out.w.assign(c, 0.0);
  for (int i = 0; i < r; ++i) {
    if (basis[i] < c) out.w[basis[i]] = t[i][cols - 1];
  }
  out.duals.assign(r, 0.0);
  for (int i = 0; i < r; ++i) out.duals[i] = t[r][c + i];
  out.objective = t[r][cols - 1];
  return out;
}

inline void fill_tight_sets(const Matrix& m, MatrixGameSolution& sol) {
  sol.tight_rows.clear();
  sol.tight_cols.clear();
  const auto rp = row_payoffs(m, sol.row_strategy);
  const auto cp = col_payoffs(m, sol.col_strategy);
  for (int j = 0; j < static_cast<int>(rp.size()); ++j) {
    if (rp[j] - sol.value < kSlackTolerance) sol.tight_cols.push_back(j);
  }
  for (int i = 0; i < static_cast<int>(cp.size()); ++i) {
    if (sol.value - cp[i] < kSlackTolerance) sol.tight_rows.push_back(i);
  }
}

}  // namespace detail

/// Solves the zero-sum matrix game by linear programming: the row player's
/// maximin LP after shifting all entries positive, with the column strategy
/// read from the duals. Deterministic pivoting makes repeated solves of the
/// same matrix identical.
inline MatrixGameSolution solve_matrix_game(const Matrix& m) {
  detail::check_matrix(m);
  const int r = static_cast<int>(m.size());
  const int c = static_cast<int>(m[0].size());

  double lo = m[0][0];
  for (const auto& row : m) {
    for (double x : row) lo = std::min(lo, x);
  }
  const double shift = 1.0 - lo;
  Matrix a(r, std::vector<double>(c));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) a[i][j] = m[i][j] + shift;
  }

  const auto lp = detail::solve_positive_matrix_lp(a);
  if (!(lp.objective > 0.0)) throw SolveError("matrix-game LP returned non-positive objective");

  MatrixGameSolution sol;
  sol.value = 1.0 / lp.objective - shift;
  sol.col_strategy = lp.w;
  sol.row_strategy = lp.duals;
  clamp_small_negatives(sol.row_strategy);
  clamp_small_negatives(sol.col_strategy);
  normalize_distribution(sol.row_strategy);
  normalize_distribution(sol.col_strategy);
  detail::fill_tight_sets(m, sol);
  return sol;
}

/// Sharpens an LP solution by re-solving its tight constraints as an
/// equality system with Gaussian elimination. On each side: take the support
/// of the strategy and the tight opposing constraints; when they form a
/// solvable square system whose solution does not worsen that side's
/// guarantee, replace the strategy (and value) with the eliminated one.
/// Otherwise that side falls back to shifting the rounding residue onto its
/// highest-probability action. Either way the returned strategies sum to
/// exactly 1.
inline MatrixGameSolution refine_solution(const Matrix& m, const MatrixGameSolution& raw) {
  detail::check_matrix(m);
  const int r = static_cast<int>(m.size());
  const int c = static_cast<int>(m[0].size());
  if (static_cast<int>(raw.row_strategy.size()) != r ||
      static_cast<int>(raw.col_strategy.size()) != c) {
    throw std::invalid_argument("solution dimensions do not match the matrix");
  }

  MatrixGameSolution out = raw;
  out.refined = false;

  const auto raw_rp = detail::row_payoffs(m, raw.row_strategy);
  const auto raw_cp = detail::col_payoffs(m, raw.col_strategy);
  const double raw_row_guarantee = *std::min_element(raw_rp.begin(), raw_rp.end());
  const double raw_col_guarantee = *std::max_element(raw_cp.begin(), raw_cp.end());

  // Shifts the rounding residue onto the highest-probability action; the
  // fallback normalization when the tight system is unusable.
  auto fallback_normalize = [](std::vector<double>& p) {
    clamp_small_negatives(p);
    double sum = 0.0;
    for (double v : p) sum += v;
    *std::max_element(p.begin(), p.end()) += 1.0 - sum;
  };

  bool row_refined = false;
  // Row side: equalize payoffs over tight columns.
  {
    std::vector<int> support, tight;
    for (int i = 0; i < r; ++i) {
      if (raw.row_strategy[i] > kSlackTolerance) support.push_back(i);
    }
    for (int j = 0; j < c; ++j) {
      if (raw_rp[j] - raw_row_guarantee < kSlackTolerance) tight.push_back(j);
    }
    if (!support.empty() && support.size() == tight.size()) {
      const int k = static_cast<int>(support.size());
      std::vector<std::vector<double>> sys(k + 1, std::vector<double>(k + 1, 0.0));
      std::vector<double> rhs(k + 1, 0.0);
      for (int row = 0; row < k; ++row) {
        for (int col = 0; col < k; ++col) sys[row][col] = m[support[col]][tight[row]];
        sys[row][k] = -1.0;  // minus the value
      }
      for (int col = 0; col < k; ++col) sys[k][col] = 1.0;
      rhs[k] = 1.0;
      if (auto solved = solve_linear(sys, rhs)) {
        std::vector<double> x(r, 0.0);
        bool ok = true;
        for (int col = 0; col < k; ++col) {
          x[support[col]] = (*solved)[col];
          if ((*solved)[col] < -1e-9) ok = false;
        }
        if (ok) {
          clamp_small_negatives(x);
          normalize_distribution(x);
          const auto rp = detail::row_payoffs(m, x);
          if (*std::min_element(rp.begin(), rp.end()) >= raw_row_guarantee - 1e-12) {
            out.row_strategy = std::move(x);
            out.value = (*solved)[k];
            row_refined = true;
          }
        }
      }
    }
    if (!row_refined) fallback_normalize(out.row_strategy);
  }

  bool col_refined = false;
  // Column side: equalize payoffs over tight rows.
  {
    std::vector<int> support, tight;
    for (int j = 0; j < c; ++j) {
      if (raw.col_strategy[j] > kSlackTolerance) support.push_back(j);
    }
    for (int i = 0; i < r; ++i) {
      if (raw_col_guarantee - raw_cp[i] < kSlackTolerance) tight.push_back(i);
    }
    if (!support.empty() && support.size() == tight.size()) {
      const int k = static_cast<int>(support.size());
      std::vector<std::vector<double>> sys(k + 1, std::vector<double>(k + 1, 0.0));
      std::vector<double> rhs(k + 1, 0.0);
      for (int row = 0; row < k; ++row) {
        for (int col = 0; col < k; ++col) sys[row][col] = m[tight[row]][support[col]];
        sys[row][k] = -1.0;
      }
      for (int col = 0; col < k; ++col) sys[k][col] = 1.0;
      rhs[k] = 1.0;
      if (auto solved = solve_linear(sys, rhs)) {
        std::vector<double> y(c, 0.0);
        bool ok = true;
        for (int col = 0; col < k; ++col) {
          y[support[col]] = (*solved)[col];
          if ((*solved)[col] < -1e-9) ok = false;
        }
        if (ok) {
          clamp_small_negatives(y);
          normalize_distribution(y);
          const auto cp = detail::col_payoffs(m, y);
          if (*std::max_element(cp.begin(), cp.end()) <= raw_col_guarantee + 1e-12) {
            out.col_strategy = std::move(y);
            if (!row_refined) out.value = (*solved)[k];
            col_refined = true;
          }
        }
      }
    }
    if (!col_refined) fallback_normalize(out.col_strategy);
  }

  out.refined = row_refined || col_refined;
  detail::fill_tight_sets(m, out);
  return out;
}

}  // namespace ergo
