#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "belldist/estimator.hpp"

namespace belldist {

class NoFeasibleBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-form triplet count when all three probability errors are equal:
// delta_t = 2 delta_z + 2 delta_x + delta_xz = 10 exp(-2 N eps^2), so
// N = ceil(ln(10/delta_t) / (2 eps^2)). Throws std::domain_error on
// non-positive inputs.
std::uint64_t n_equal_eps(double delta_t, double eps);

// Desired per-parameter accuracies and certificate confidence, planned
// against an assumed true state.
struct PlanTarget {
  double delta_t_target = 1e-2;
  double eps1 = 1e-3;
  double eps2 = 1e-3;
  double eps3 = 5e-3;
  BellDiagonalState planning_state;
};

struct Plan {
  ErrorBudget budget;   // integer n via ceiling
  double n_real = 0.0;  // un-ceilinged root, used for resource ratios
  CoincidenceProbabilities planning_p;
  std::array<double, 3> achieved_widths{};  // band widths at p_hat = p
  double achieved_delta_t = 0.0;            // delta sum at n_real
};

// Finds per-probability errors whose band widths at p_hat = p(planning_state)
// equal the eps targets (each width is monotone in its probability error),
// then the n at which the three-band delta sum meets delta_t_target. The
// evaluation point p_hat = p is a planning approximation: no data exists yet.
// Throws NoFeasibleBudgetError when a target sits below the width floor
// induced by the other errors.
Plan budget_for_targets(const PlanTarget& target);

struct TomographyPlan {
  double n_real = 0.0;
  std::uint64_t n_per_basis = 0;
  std::uint64_t total_pairs = 0;  // 3 bases, one pair each
};

// Equal per-basis count for the local-measurement baseline, which estimates
// x1, x2, 1-x3 directly as coincidence rates: solves
// sum_i 2 exp(-2 N eps_i^2) = delta_t for N.
TomographyPlan tomography_n(const PlanTarget& target);

// Grid over (q1, q2) with q3 = q4 = (1 - q1 - q2)/2; only estimator-valid
// points (q1 > 1/2, all components >= 0) are cells.
struct ScanGrid {
  double q1_min = 0.55;
  double q1_max = 1.0;
  double q1_step = 0.05;
  double q2_min = 0.0;
  double q2_max = 0.45;
  double q2_step = 0.05;
};

struct ScanCell {
  double q1 = 0.0;
  double q2 = 0.0;
  bool feasible = false;
  bool werner = false;         // on the q2 = q3 = q4 line
  double n_ds_total = 0.0;     // 3 * ceil(N) pairs
  double n_tom_total = 0.0;    // 3 * ceil(N_tom) pairs
  double ratio = 0.0;          // from the un-ceilinged solutions
};

// All valid grid cells in row-major (q1 outer, q2 inner) order.
std::vector<ScanCell> scan_cells(const ScanGrid& grid);

// Fills plan results for cells [begin, end) of scan_cells(grid); infeasible
// cells are marked, never interpolated. Cells are independent, so the scan
// fans out over workers.
std::vector<ScanCell> ratio_scan(const ScanGrid& grid, const PlanTarget& target,
                                 std::size_t cell_begin = 0,
                                 std::size_t cell_end = SIZE_MAX, int workers = 1);

}  // namespace belldist
