#include "lp_feasibility.hpp"

#include <cmath>
#include <cstddef>

#include "aid/errors.hpp"

namespace aid::detail {

namespace {
constexpr double kPivotEps = 1e-11;
}

LpResult solve_equality_feasibility(int rows, int cols, const std::vector<double>& a,
                                    std::vector<double> b) {
  const size_t m = static_cast<size_t>(rows);
  const size_t n = static_cast<size_t>(cols);
  const size_t width = n + m + 1;  // structurals, artificials, rhs

  // Tableau starts as [A | I | b] with b flipped nonnegative row-wise.
  std::vector<double> t(m * width, 0.0);
  for (size_t i = 0; i < m; ++i) {
    double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (size_t j = 0; j < n; ++j) t[i * width + j] = sign * a[i * n + j];
    t[i * width + n + i] = 1.0;
    t[i * width + n + m] = sign * b[i];
  }

  // Phase-1 objective: minimize the artificial sum. Reduced costs start as
  // the negated column sums of A; the artificial columns start at zero.
  std::vector<double> cost(n + m, 0.0);
  double objective = 0.0;
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) cost[j] -= t[i * width + j];
    objective -= t[i * width + n + m];
  }

  std::vector<size_t> basis(m);
  for (size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Dantzig's rule with smallest-index ties is fast on these transportation
  // style systems; a stall flips the pivot choice to Bland's rule, which
  // guarantees termination.
  const size_t max_iters = 200000;
  size_t stalled = 0;
  bool bland = false;
  double last_objective = objective;
  for (size_t iter = 0;; ++iter) {
    if (iter >= max_iters) {
      raise(ErrorCode::InvalidArgument, "simplex iteration cap reached");
    }
    if (objective > last_objective + 1e-13) {
      last_objective = objective;
      stalled = 0;
    } else if (++stalled > 100) {
      bland = true;
    }

    size_t enter = n + m;
    if (bland) {
      for (size_t j = 0; j < n + m; ++j) {
        if (cost[j] < -kPivotEps) {
          enter = j;
          break;
        }
      }
    } else {
      double best = -kPivotEps;
      for (size_t j = 0; j < n + m; ++j) {
        if (cost[j] < best) {
          best = cost[j];
          enter = j;
        }
      }
    }
    if (enter == n + m) break;

    size_t leave = m;
    double best_ratio = 0.0;
    for (size_t i = 0; i < m; ++i) {
      double aij = t[i * width + enter];
      if (aij <= kPivotEps) continue;
      double ratio = t[i * width + n + m] / aij;
      if (leave == m || ratio < best_ratio - kPivotEps ||
          (std::abs(ratio - best_ratio) <= kPivotEps && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) {
      // Phase-1 objective is bounded below by zero, so an unbounded column
      // can only come from numerical dust; treat it as converged.
      break;
    }

    double piv = t[leave * width + enter];
    for (size_t j = 0; j < width; ++j) t[leave * width + j] /= piv;
    for (size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      double factor = t[i * width + enter];
      if (factor == 0.0) continue;
      for (size_t j = 0; j < width; ++j) t[i * width + j] -= factor * t[leave * width + j];
    }
    double cf = cost[enter];
    if (cf != 0.0) {
      for (size_t j = 0; j < n + m; ++j) cost[j] -= cf * t[leave * width + j];
      objective -= cf * t[leave * width + n + m];
    }
    basis[leave] = enter;
  }

  LpResult result;
  result.residual = std::abs(objective);
  result.feasible = result.residual <= 1e-9;
  if (result.feasible) {
    result.x.assign(n, 0.0);
    for (size_t i = 0; i < m; ++i) {
      if (basis[i] < n) {
        double v = t[i * width + n + m];
        result.x[basis[i]] = v < 0.0 ? 0.0 : v;
      }
    }
  }
  return result;
}

}  // namespace aid::detail
