#pragma once

#include <vector>

namespace aid::detail {

struct LpResult {
  bool feasible = false;
  double residual = 0.0;    // phase-1 objective at termination
  std::vector<double> x;    // structural solution, valid when feasible
};

// Finds x >= 0 with A x = b via a dense phase-1 simplex over artificial
// variables. Bland's rule on both the entering and leaving choices keeps the
// pivot sequence deterministic and cycle-free. `a` is row-major, rows x cols.
LpResult solve_equality_feasibility(int rows, int cols, const std::vector<double>& a,
                                    std::vector<double> b);

}  // namespace aid::detail
