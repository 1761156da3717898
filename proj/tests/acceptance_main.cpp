// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "belldist/estimator.hpp"
#include "belldist/histogram.hpp"
#include "belldist/json_out.hpp"
#include "belldist/planner.hpp"
#include "belldist/statevector_oracle.hpp"
#include "belldist/trial_engine.hpp"

using namespace belldist;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

BellDiagonalState random_state(RandomStream& stream) {
  double e[4];
  double sum = 0.0;
  for (double& v : e) {
    double u;
    do {
      u = stream.next_unit();
    } while (u == 0.0);
    v = -std::log(u);
    sum += v;
  }
  return BellDiagonalState{e[0] / sum, e[1] / sum, e[2] / sum, e[3] / sum};
}

XVector random_admissible_x(RandomStream& stream) {
  double v[3];
  for (double& x : v) {
    double u;
    do {
      u = stream.next_unit();
    } while (u == 0.0);
    x = 1.0 - 0.5 * u;
  }
  return XVector{v[0], v[1], v[2]};
}

std::string g12(double v) { return format_g12(v); }

// 1. analytic == enumeration == statevector on 1e4 random states, 1e-12.
Outcome criterion_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  RandomStream stream(101);
  double worst_analytic = 0.0;
  double worst_sv = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const BellDiagonalState q = random_state(stream);
    const CoincidenceProbabilities analytic = coincidence_probabilities(q_to_x(q));
    const CoincidenceProbabilities numeric = enumerate_coincidence_probs(q);
    const CoincidenceProbabilities sv = statevector_probs(q);
    worst_analytic =
        std::max({worst_analytic, std::abs(analytic.p_z - numeric.p_z),
                  std::abs(analytic.p_x - numeric.p_x), std::abs(analytic.p_xz - numeric.p_xz)});
    worst_sv = std::max({worst_sv, std::abs(sv.p_z - numeric.p_z),
                         std::abs(sv.p_x - numeric.p_x), std::abs(sv.p_xz - numeric.p_xz)});
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Outcome out;
  out.pass = worst_analytic < 1e-12 && worst_sv < 1e-12 && seconds < 60.0;
  out.detail = "max|analytic-enum|=" + g12(worst_analytic) +
               " max|enum-statevector|=" + g12(worst_sv) + " runtime=" + g12(seconds) + "s";
  return out;
}

// 2. forward then inverse recovers 1e4 random admissible x to 1e-10.
Outcome criterion_inversion_round_trip() {
  RandomStream stream(102);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const XVector x = random_admissible_x(stream);
    const CoincidenceProbabilities p = coincidence_probabilities(x);
    worst = std::max({worst, std::abs(invert_x1(p.p_z) - x.x1),
                      std::abs(invert_x2(p.p_x) - x.x2), std::abs(invert_x3(p) - x.x3)});
  }
  Outcome out;
  out.pass = worst < 1e-10;
  out.detail = "max recovery error=" + g12(worst);
  return out;
}

HistogramResult reference_histogram(const BellDiagonalState& q) {
  HistogramConfig config;
  config.q = q;
  config.n = 10000;
  config.trials = 1000;
  config.master_seed = 1;
  config.eps_z = config.eps_x = config.eps_xz = 0.01;
  config.workers = 4;
  return run_histogram(config);
}

// 3. lossy reference state: mean in [0.006, 0.014], std in [0.002, 0.006].
Outcome criterion_histogram_lossy() {
  const HistogramResult r = reference_histogram(BellDiagonalState{0.62, 0.15, 0.05, 0.18});
  Outcome out;
  out.pass = r.failures == 0 && r.mean >= 0.006 && r.mean <= 0.014 && r.std_dev >= 0.002 &&
             r.std_dev <= 0.006;
  out.detail = "mean=" + g12(r.mean) + " std=" + g12(r.std_dev) +
               " failures=" + std::to_string(r.failures);
  return out;
}

// 4. high-fidelity state: mean in [0.002, 0.005], std in [0.0005, 0.002],
//    and at least 99% of distances at or below 0.010.
Outcome criterion_histogram_high_fidelity() {
  const HistogramResult r = reference_histogram(BellDiagonalState{0.88, 0.02, 0.05, 0.05});
  int within = 0;
  int total = 0;
  for (std::size_t t = 0; t < r.distances.size(); ++t) {
    if (!r.ok[t]) continue;
    ++total;
    if (r.distances[t] <= 0.010) ++within;
  }
  const double frac = total > 0 ? static_cast<double>(within) / total : 0.0;
  Outcome out;
  out.pass = r.failures == 0 && r.mean >= 0.002 && r.mean <= 0.005 && r.std_dev >= 0.0005 &&
             r.std_dev <= 0.002 && frac >= 0.99;
  out.detail = "mean=" + g12(r.mean) + " std=" + g12(r.std_dev) +
               " frac(D<=0.01)=" + g12(frac);
  return out;
}

// 5. certificate soundness at the lossy state, n=1e4, eps = 0.01 each,
//    2000 trials.
Outcome criterion_certificate_soundness() {
  const BellDiagonalState q{0.62, 0.15, 0.05, 0.18};
  const int trials = 2000;
  RandomStream seeds(105);
  int miss = 0;
  int failures = 0;
  double delta_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    const RunSummary s = run(q, 10000, seeds.next_u64());
    const EstimateResult r = estimate(s, 0.01, 0.01, 0.01);
    if (!succeeded(r)) {
      ++failures;
      continue;
    }
    const EstimateReport& report = std::get<EstimateReport>(r);
    delta_sum += report.delta_t;
    if (trace_distance(report.q_hat, q) >= report.eps_t) ++miss;
  }
  const int counted = trials - failures;
  const double fraction = counted > 0 ? static_cast<double>(miss) / counted : 1.0;
  const double delta_t = counted > 0 ? delta_sum / counted : 1.0;
  const double slack = 3.0 * std::sqrt(std::max(delta_t * (1.0 - delta_t), 0.25 / counted) /
                                       static_cast<double>(counted));
  Outcome out;
  out.pass = failures == 0 && fraction <= delta_t + slack;
  out.detail = "fraction(D>=eps_t)=" + g12(fraction) + " delta_t=" + g12(delta_t) +
               " slack=" + g12(slack) + " failures=" + std::to_string(failures);
  return out;
}

// 6. closed-form sample size and its quartic scaling.
Outcome criterion_closed_form() {
  const std::uint64_t n = n_equal_eps(0.01, 1e-3);
  bool scaling = true;
  std::string ratios;
  for (double eps : {1e-3, 5e-4}) {
    const double r = static_cast<double>(n_equal_eps(0.01, eps)) /
                     static_cast<double>(n_equal_eps(0.01, 2.0 * eps));
    scaling = scaling && r >= 3.99 && r <= 4.01;
    ratios += (ratios.empty() ? "" : ", ") + g12(r);
  }
  Outcome out;
  out.pass = (n == 3453878) && scaling;
  out.detail = "n(0.01,1e-3)=" + std::to_string(n) + " scaling ratios: " + ratios;
  return out;
}

// 7. coarse-grid ratio scan: near-unity cost at q1 >= 0.9, strictly growing
//    cost down the Werner line.
Outcome criterion_ratio_scan() {
  PlanTarget target;
  target.delta_t_target = 1e-2;
  target.eps1 = 1e-3;
  target.eps2 = 1e-3;
  target.eps3 = 5e-3;

  ScanGrid grid;
  grid.q1_min = 0.55;
  grid.q1_max = 1.0;
  grid.q1_step = 0.05;
  grid.q2_min = 0.0;
  grid.q2_max = 0.45;
  grid.q2_step = 0.05;
  const auto cells = ratio_scan(grid, target, 0, SIZE_MAX, 4);

  double worst_high_fidelity = 0.0;
  bool high_cells_feasible = true;
  for (const ScanCell& cell : cells) {
    if (cell.q1 >= 0.9 - 1e-9) {
      if (!cell.feasible) {
        high_cells_feasible = false;
      } else {
        worst_high_fidelity = std::max(worst_high_fidelity, cell.ratio);
      }
    }
  }

  // Werner line sampled at the grid resolution.
  const TomographyPlan tom = tomography_n(target);
  std::vector<double> werner_ratios;
  bool werner_feasible = true;
  for (int i = 0; i <= 9; ++i) {
    const double q1 = 0.55 + 0.05 * i;
    const double rest = (1.0 - q1) / 3.0;
    PlanTarget cell = target;
    cell.planning_state = BellDiagonalState{std::min(q1, 1.0), rest, rest, rest};
    try {
      werner_ratios.push_back(budget_for_targets(cell).n_real / tom.n_real);
    } catch (const NoFeasibleBudgetError&) {
      werner_feasible = false;
    }
  }
  bool strictly_increasing_downward = werner_ratios.size() >= 2;
  for (std::size_t i = 1; i < werner_ratios.size(); ++i) {
    // q1 grows with i, so the ratio must strictly fall.
    if (!(werner_ratios[i] < werner_ratios[i - 1])) strictly_increasing_downward = false;
  }

  Outcome out;
  out.pass = high_cells_feasible && worst_high_fidelity <= 1.5 && werner_feasible &&
             strictly_increasing_downward;
  out.detail = "max ratio(q1>=0.9)=" + g12(worst_high_fidelity) + " werner ratios " +
               g12(werner_ratios.front()) + "(q1=0.55) .. " + g12(werner_ratios.back()) +
               "(q1=1.0), strictly increasing toward low q1: " +
               (strictly_increasing_downward ? "yes" : "no");
  return out;
}

// 8. distillation improvement over randomized admissible states. Faithful to
//    the stated property; see the suite footer for the measured counterexample
//    analysis when it fails.
Outcome criterion_distillation_improvement() {
  RandomStream stream(108);
  int violations = 0;
  double worst_drop = 0.0;
  BellDiagonalState worst_state;
  for (int i = 0; i < 1000; ++i) {
    BellDiagonalState q;
    do {
      q = random_state(stream);
    } while (q.q1 <= 0.5);
    const DistillationResult r = distilled_map(q);
    const bool strict_needed = q.q1 < 1.0;
    const bool ok = strict_needed ? r.survivor_state.q1 > q.q1
                                  : r.survivor_state.q1 >= q.q1 - 1e-12;
    if (!ok) {
      ++violations;
      const double drop = q.q1 - r.survivor_state.q1;
      if (drop > worst_drop) {
        worst_drop = drop;
        worst_state = q;
      }
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = "violations=" + std::to_string(violations) + "/1000";
  if (violations > 0) {
    out.detail += " worst drop=" + g12(worst_drop) + " at q=(" + g12(worst_state.q1) + "," +
                  g12(worst_state.q2) + "," + g12(worst_state.q3) + "," +
                  g12(worst_state.q4) + ")";
  }
  return out;
}

// 9. cmd_histogram determinism across reruns and worker counts.
Outcome criterion_determinism() {
  const std::string cli = BELLDIST_CLI_PATH;
  const fs::path dir =
      fs::temp_directory_path() / ("belldist_acc_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string base = cli +
                           " histogram --q 0.62,0.15,0.05,0.18 --n 1000 --trials 100 "
                           "--seed 33 --eps-z 0.01 --eps-x 0.01 --eps-xz 0.01 ";
  const auto run_one = [&](const std::string& sub, int workers) -> bool {
    const std::string cmd = base + "--workers " + std::to_string(workers) + " --out " +
                            (dir / sub).string() + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
  };
  const auto slurp = [](const fs::path& p) -> std::string {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
  };

  Outcome out;
  if (!run_one("a", 1) || !run_one("b", 1) || !run_one("c", 4)) {
    out.detail = "cli invocation failed";
    fs::remove_all(dir);
    return out;
  }
  const std::string csv_a = slurp(dir / "a" / "histogram_distances.csv");
  const std::string csv_b = slurp(dir / "b" / "histogram_distances.csv");
  const std::string csv_c = slurp(dir / "c" / "histogram_distances.csv");
  const std::string sum_a = slurp(dir / "a" / "histogram_summary.json");
  const std::string sum_b = slurp(dir / "b" / "histogram_summary.json");
  const std::string sum_c = slurp(dir / "c" / "histogram_summary.json");
  fs::remove_all(dir);

  out.pass = !csv_a.empty() && csv_a == csv_b && csv_a == csv_c && !sum_a.empty() &&
             sum_a == sum_b && sum_a == sum_c;
  out.detail = out.pass ? "byte-identical CSV and JSON across rerun and workers 1/4"
                        : "outputs differ";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"oracle equivalence (analytic / enumeration / statevector)", criterion_oracle_equivalence},
      {"inversion round trip on admissible x", criterion_inversion_round_trip},
      {"trace-distance histogram, lossy reference state", criterion_histogram_lossy},
      {"trace-distance histogram, high-fidelity state", criterion_histogram_high_fidelity},
      {"certificate soundness over 2000 trials", criterion_certificate_soundness},
      {"closed-form sample size and scaling", criterion_closed_form},
      {"resource-ratio scan structure", criterion_ratio_scan},
      {"distillation fidelity improvement", criterion_distillation_improvement},
      {"histogram output determinism", criterion_determinism},
  };

  int failures = 0;
  int id = 0;
  bool improvement_failed = false;
  for (const Entry& entry : entries) {
    ++id;
    Outcome out;
    try {
      out = entry.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    if (!out.pass) {
      ++failures;
      if (id == 8) improvement_failed = true;
    }
    std::cout << "[" << id << "] " << (out.pass ? "PASS" : "FAIL") << " " << entry.name
              << " -- " << out.detail << "\n";
  }

  if (failures > 0) {
    std::cout << failures << " criterion(s) failed.\n";
  } else {
    std::cout << "all criteria passed.\n";
  }
  if (improvement_failed) {
    std::cout << "note: criterion 8 asserts single-round fidelity improvement over the whole\n"
                 "q1 > 1/2 region. Phase-error-dominated states (large q2) provably lose\n"
                 "fidelity in one round of this protocol orientation (the detail line shows\n"
                 "a measured counterexample, cross-checked by the statevector model), so a\n"
                 "faithful implementation cannot satisfy the criterion as stated.\n";
  }
  return failures == 0 ? 0 : 1;
}
