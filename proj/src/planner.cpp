#include "belldist/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace belldist {

namespace {

constexpr double kHuge = std::numeric_limits<double>::infinity();

// Ceiling with a relative slack so closed forms landing on an integer up to
// roundoff do not get bumped a unit.
std::uint64_t ceil_with_slack(double v) {
  const double adjusted = v - std::max(1e-12, 1e-12 * std::abs(v));
  const double c = std::ceil(adjusted);
  return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

// Largest argument in [lo, hi] with f(arg) <= 0, for f monotone
// non-decreasing (possibly +inf past its domain). Assumes f(lo) <= 0.
double bisect_last_nonpositive(const std::function<double(double)>& f, double lo, double hi) {
  if (f(hi) <= 0.0) return hi;
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Width of the x1 band at p_hat = p for probability error e.
double width1_at(double p, double e) {
  const double x_hat = eval_x1(p);
  const double upper = eval_x1(std::min(p + e, 1.0));
  const double lower = eval_x1(std::max(p - e, 0.5));
  return std::max(upper - x_hat, x_hat - lower);
}

double width2_at(double p, double e) {
  const double x_hat = eval_x2(p);
  const double upper = eval_x2(std::min(p + e, 1.0));
  const double lower = eval_x2(std::max(p - e, 0.5));
  return std::max(upper - x_hat, x_hat - lower);
}

// Width of the x3 band; +inf when a corner leaves the reals.
double width3_at(const CoincidenceProbabilities& p, double ez, double ex, double exz) {
  const double x_hat = eval_x3(p.p_z, p.p_x, p.p_xz);
  if (std::isnan(x_hat)) return kHuge;
  const double upper = eval_x3(std::max(p.p_z - ez, 0.5), std::max(p.p_x - ex, 0.5),
                               std::min(p.p_xz + exz, 1.0));
  if (std::isnan(upper)) return kHuge;
  const double lower = eval_x3(std::min(p.p_z + ez, 1.0), std::min(p.p_x + ex, 1.0),
                               std::max(p.p_xz - exz, 0.25));
  if (std::isnan(lower)) return kHuge;
  return std::max(std::min(upper, 1.0) - x_hat, x_hat - lower);
}

// Unclamped delta sum delta_1 + delta_2 + delta_3 as a function of real n.
double delta_sum(double n, double ez, double ex, double exz) {
  return 4.0 * std::exp(-2.0 * n * ez * ez) + 4.0 * std::exp(-2.0 * n * ex * ex) +
         2.0 * std::exp(-2.0 * n * exz * exz);
}

// Real n solving delta_sum(n) = delta_target (monotone decreasing in n).
double solve_n(double delta_target, double ez, double ex, double exz) {
  double lo = 1e-9;
  if (delta_sum(lo, ez, ex, exz) <= delta_target) return lo;
  double hi = 1.0;
  while (delta_sum(hi, ez, ex, exz) > delta_target) {
    hi *= 2.0;
    if (hi > 1e18) throw NoFeasibleBudgetError("required sample count exceeds 1e18");
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (delta_sum(mid, ez, ex, exz) > delta_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void validate_target(const PlanTarget& target) {
  if (!(target.delta_t_target > 0.0 && target.delta_t_target < 1.0)) {
    throw std::domain_error("delta_t_target must lie in (0,1)");
  }
  for (double e : {target.eps1, target.eps2, target.eps3}) {
    if (!(e > 0.0)) throw std::domain_error("eps targets must be positive");
  }
}

bool is_werner_cell(double q1, double q2) {
  return std::abs(q2 - (1.0 - q1) / 3.0) <= 1e-9;
}

}  // namespace

std::uint64_t n_equal_eps(double delta_t, double eps) {
  if (!(delta_t > 0.0)) throw std::domain_error("delta_t must be positive");
  if (!(eps > 0.0)) throw std::domain_error("eps must be positive");
  return ceil_with_slack(std::log(10.0 / delta_t) / (2.0 * eps * eps));
}

Plan budget_for_targets(const PlanTarget& target) {
  validate_target(target);
  validate_physical(target.planning_state);
  if (!target.planning_state.is_estimator_admissible()) {
    throw std::domain_error("planning_state must have q1 > 1/2");
  }
  const XVector x = q_to_x(target.planning_state);
  const CoincidenceProbabilities p = coincidence_probabilities(x);

  // Probability errors are searched up to just below 1; a width that never
  // reaches the target means the clamps saturated and the promise holds
  // with margin at the bracket top.
  const double eps_hi = 1.0 - 1e-12;

  const double ez =
      bisect_last_nonpositive([&](double e) { return width1_at(p.p_z, e) - target.eps1; }, 0.0,
                              eps_hi);
  const double ex =
      bisect_last_nonpositive([&](double e) { return width2_at(p.p_x, e) - target.eps2; }, 0.0,
                              eps_hi);

  const double floor3 = width3_at(p, ez, ex, 0.0);
  if (floor3 > target.eps3) {
    std::ostringstream msg;
    msg << "eps3 target " << target.eps3 << " below the width floor " << floor3
        << " induced by eps_z, eps_x at this state";
    throw NoFeasibleBudgetError(msg.str());
  }
  const double exz = bisect_last_nonpositive(
      [&](double e) { return width3_at(p, ez, ex, e) - target.eps3; }, 0.0, eps_hi);

  if (!(ez > 0.0 && ex > 0.0 && exz > 0.0)) {
    throw NoFeasibleBudgetError("eps targets too small to admit positive probability errors");
  }

  Plan plan;
  plan.n_real = solve_n(target.delta_t_target, ez, ex, exz);
  plan.budget = ErrorBudget{ez, ex, exz, ceil_with_slack(plan.n_real)};
  plan.planning_p = p;
  plan.achieved_widths = {width1_at(p.p_z, ez), width2_at(p.p_x, ex), width3_at(p, ez, ex, exz)};
  plan.achieved_delta_t = delta_sum(plan.n_real, ez, ex, exz);
  return plan;
}

TomographyPlan tomography_n(const PlanTarget& target) {
  validate_target(target);
  const double e1 = target.eps1, e2 = target.eps2, e3 = target.eps3;
  const auto delta = [&](double n) {
    return 2.0 * (std::exp(-2.0 * n * e1 * e1) + std::exp(-2.0 * n * e2 * e2) +
                  std::exp(-2.0 * n * e3 * e3));
  };
  double lo = 1e-9;
  TomographyPlan plan;
  if (delta(lo) <= target.delta_t_target) {
    plan.n_real = lo;
  } else {
    double hi = 1.0;
    while (delta(hi) > target.delta_t_target) {
      hi *= 2.0;
      if (hi > 1e18) throw std::domain_error("tomography sample count exceeds 1e18");
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-12 * (1.0 + hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      if (delta(mid) > target.delta_t_target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    plan.n_real = 0.5 * (lo + hi);
  }
  plan.n_per_basis = ceil_with_slack(plan.n_real);
  plan.total_pairs = 3 * plan.n_per_basis;
  return plan;
}

std::vector<ScanCell> scan_cells(const ScanGrid& grid) {
  if (!(grid.q1_step > 0.0 && grid.q2_step > 0.0)) {
    throw std::domain_error("grid steps must be positive");
  }
  std::vector<ScanCell> cells;
  const double pad = 1e-9;
  for (int i = 0;; ++i) {
    const double q1 = grid.q1_min + i * grid.q1_step;
    if (q1 > grid.q1_max + pad) break;
    if (q1 <= 0.5 || q1 > 1.0 + pad) continue;
    for (int j = 0;; ++j) {
      const double q2 = grid.q2_min + j * grid.q2_step;
      if (q2 > grid.q2_max + pad) break;
      if (q2 < -pad || q1 + q2 > 1.0 + pad) continue;
      ScanCell cell;
      cell.q1 = std::min(q1, 1.0);
      cell.q2 = std::max(q2, 0.0);
      cell.werner = is_werner_cell(cell.q1, cell.q2);
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<ScanCell> ratio_scan(const ScanGrid& grid, const PlanTarget& target,
                                 std::size_t cell_begin, std::size_t cell_end, int workers) {
  validate_target(target);
  std::vector<ScanCell> cells = scan_cells(grid);
  if (cell_begin > cells.size()) cell_begin = cells.size();
  if (cell_end > cells.size()) cell_end = cells.size();
  if (cell_begin > cell_end) cell_begin = cell_end;
  cells.erase(cells.begin() + cell_end, cells.end());
  cells.erase(cells.begin(), cells.begin() + cell_begin);

  const TomographyPlan tom = tomography_n(target);

  auto fill = [&](ScanCell& cell) {
    const double rest = (1.0 - cell.q1 - cell.q2) / 2.0;
    PlanTarget cell_target = target;
    cell_target.planning_state = BellDiagonalState{cell.q1, cell.q2, rest, rest};
    try {
      const Plan plan = budget_for_targets(cell_target);
      cell.feasible = true;
      cell.n_ds_total = 3.0 * static_cast<double>(plan.budget.n);
      cell.n_tom_total = 3.0 * static_cast<double>(tom.n_per_basis);
      cell.ratio = plan.n_real / tom.n_real;
    } catch (const NoFeasibleBudgetError&) {
      cell.feasible = false;
    }
  };

  if (workers <= 1 || cells.size() <= 1) {
    for (ScanCell& cell : cells) fill(cell);
  } else {
    const std::size_t count = cells.size();
    const std::size_t nthreads = std::min<std::size_t>(workers, count);
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
      threads.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += nthreads) fill(cells[i]);
      });
    }
    for (auto& th : threads) th.join();
  }
  return cells;
}

}  // namespace belldist
