// Command-line front end: simulation, estimation, planning and the
// differential oracle check, with JSON/CSV outputs for plotting.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "belldist/estimator.hpp"
#include "belldist/histogram.hpp"
#include "belldist/json_out.hpp"
#include "belldist/planner.hpp"
#include "belldist/statevector_oracle.hpp"
#include "belldist/trial_engine.hpp"

namespace {

using belldist::BellDiagonalState;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitEstimationFailure = 2;
constexpr int kExitInfeasiblePlan = 3;
constexpr int kExitIoError = 4;
constexpr int kExitOracleMismatch = 5;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

// Per-command parameters resolve as: flag > config file > default.
struct ConfigView {
  json data = json::object();

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError(kExitIoError, "cannot open config file " + path);
    try {
      in >> data;
    } catch (const json::exception& e) {
      throw CliError(kExitIoError, std::string("malformed config JSON: ") + e.what());
    }
    if (!data.is_object()) throw CliError(kExitIoError, "config root must be a JSON object");
  }

  template <typename T>
  T get(const std::string& key, const std::optional<T>& flag, T fallback) const {
    if (flag) return *flag;
    if (data.contains(key)) {
      try {
        return data.at(key).get<T>();
      } catch (const json::exception& e) {
        throw CliError(kExitIoError, "config key \"" + key + "\": " + e.what());
      }
    }
    return fallback;
  }

  template <typename T>
  std::optional<T> maybe(const std::string& key, const std::optional<T>& flag) const {
    if (flag) return flag;
    if (data.contains(key)) {
      try {
        return data.at(key).get<T>();
      } catch (const json::exception& e) {
        throw CliError(kExitIoError, "config key \"" + key + "\": " + e.what());
      }
    }
    return std::nullopt;
  }
};

BellDiagonalState state_from_vector(const std::vector<double>& q) {
  if (q.size() != 4) {
    throw CliError(kExitIoError, "q must have exactly 4 components");
  }
  const BellDiagonalState state{q[0], q[1], q[2], q[3]};
  if (!state.is_physical()) {
    throw CliError(kExitIoError, "q is not a normalized probability vector");
  }
  return state;
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

std::filesystem::path prepare_out_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CliError(kExitIoError, "cannot create output directory " + out);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kExitIoError, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw CliError(kExitIoError, "write failed for " + path.string());
}

// Options shared by most subcommands.
struct CommonOpts {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<double> q_flag;

  ConfigView view() const {
    ConfigView view;
    if (config_path) view.load(*config_path);
    return view;
  }

  std::optional<std::vector<double>> q_opt() const {
    if (q_flag.empty()) return std::nullopt;
    return q_flag;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_q = true) {
  cmd->add_option("--config", opts.config_path, "JSON config file; flags override its keys");
  cmd->add_option("--out", opts.out, "output directory (default .)");
  cmd->add_option("--seed", opts.seed, "master seed");
  cmd->add_option("--workers", opts.workers, "worker threads (0 = auto)");
  if (with_q) {
    cmd->add_option("--q", opts.q_flag, "Bell-diagonal coefficients q1,q2,q3,q4")
        ->delimiter(',')
        ->expected(0, 4);
  }
}

int cmd_probe(const CommonOpts& common) {
  const ConfigView cfg = common.view();
  const auto q_vec = cfg.maybe<std::vector<double>>("q", common.q_opt());
  if (!q_vec) throw CliError(kExitIoError, "probe requires --q");
  const BellDiagonalState q = state_from_vector(*q_vec);

  const belldist::XVector x = belldist::q_to_x(q);
  const auto analytic = belldist::coincidence_probabilities(x);
  const auto numeric = belldist::enumerate_coincidence_probs(q);

  using belldist::format_g12;
  std::cout << "q = (" << format_g12(q.q1) << ", " << format_g12(q.q2) << ", "
            << format_g12(q.q3) << ", " << format_g12(q.q4) << ")\n";
  std::cout << "x = (" << format_g12(x.x1) << ", " << format_g12(x.x2) << ", "
            << format_g12(x.x3) << ")\n";
  const auto row = [](const char* name, double a, double b) {
    std::cout << name << " analytic=" << format_g12(a) << " enumerated=" << format_g12(b)
              << " |diff|=" << format_g12(std::abs(a - b)) << "\n";
  };
  row("p_z ", analytic.p_z, numeric.p_z);
  row("p_x ", analytic.p_x, numeric.p_x);
  row("p_xz", analytic.p_xz, numeric.p_xz);
  return kExitOk;
}

int cmd_simulate(const CommonOpts& common, const std::optional<std::uint64_t>& n_flag) {
  const ConfigView cfg = common.view();
  const auto q_vec = cfg.maybe<std::vector<double>>("q", common.q_opt());
  if (!q_vec) throw CliError(kExitIoError, "simulate requires --q");
  const BellDiagonalState q = state_from_vector(*q_vec);
  const auto n = cfg.get<std::uint64_t>("n", n_flag, 10000);
  const auto seed = cfg.get<std::uint64_t>("seed", common.seed, 1);
  const int workers = resolve_workers(cfg.get<int>("workers", common.workers, 0));
  const auto dir = prepare_out_dir(cfg.get<std::string>("out", common.out, "."));

  const auto records = belldist::generate_records(q, n, seed, workers);
  belldist::RecordFileMeta meta;
  meta.n = n;
  meta.master_seed = seed;
  meta.q = q;
  const std::string csv_path = (dir / "records.csv").string();
  try {
    belldist::export_records(csv_path, records, meta);
  } catch (const belldist::RecordIoError& e) {
    throw CliError(kExitIoError, e.what());
  }

  const belldist::RunSummary summary = belldist::summarize(records, seed);
  const auto p_hat = summary.empirical();
  std::cout << "wrote " << csv_path << " (+.meta.json)\n";
  std::cout << "n=" << summary.n << " count_z=" << summary.count_z
            << " count_x=" << summary.count_x << " count_xz=" << summary.count_xz << "\n";
  std::cout << "p_hat = (" << belldist::format_g12(p_hat.p_z) << ", "
            << belldist::format_g12(p_hat.p_x) << ", " << belldist::format_g12(p_hat.p_xz)
            << ")\n";
  return kExitOk;
}

int cmd_estimate(const CommonOpts& common, const std::optional<std::uint64_t>& n_flag,
                 const std::optional<std::string>& records_flag,
                 const std::optional<double>& eps_z_flag,
                 const std::optional<double>& eps_x_flag,
                 const std::optional<double>& eps_xz_flag, bool distill_flag) {
  const ConfigView cfg = common.view();
  const double eps_z = cfg.get<double>("eps_z", eps_z_flag, 0.01);
  const double eps_x = cfg.get<double>("eps_x", eps_x_flag, 0.01);
  const double eps_xz = cfg.get<double>("eps_xz", eps_xz_flag, 0.01);
  const bool distill =
      distill_flag || cfg.get<bool>("distill", std::nullopt, false);
  const auto dir = prepare_out_dir(cfg.get<std::string>("out", common.out, "."));
  const auto records_path = cfg.maybe<std::string>("records", records_flag);

  belldist::RunSummary summary;
  if (records_path) {
    try {
      const belldist::ImportedRecords imported = belldist::import_records(*records_path);
      summary = belldist::summarize(imported.records, imported.meta.master_seed);
    } catch (const belldist::RecordIoError& e) {
      throw CliError(kExitIoError, e.what());
    }
  } else {
    const auto q_vec = cfg.maybe<std::vector<double>>("q", common.q_opt());
    if (!q_vec) throw CliError(kExitIoError, "estimate requires --records or --q");
    const BellDiagonalState q = state_from_vector(*q_vec);
    const auto n = cfg.get<std::uint64_t>("n", n_flag, 10000);
    const auto seed = cfg.get<std::uint64_t>("seed", common.seed, 1);
    const int workers = resolve_workers(cfg.get<int>("workers", common.workers, 0));
    summary = belldist::run(q, n, seed, workers);
  }

  const belldist::EstimateResult result = belldist::estimate(summary, eps_z, eps_x, eps_xz);
  const auto report_path = dir / "estimate_report.json";

  if (const auto* failure = std::get_if<belldist::EstimationFailure>(&result)) {
    write_file(report_path, belldist::dump_json(belldist::failure_json(*failure)));
    std::cout << "estimation failed: " << failure->reason << "\n";
    std::cout << "wrote " << report_path.string() << "\n";
    return kExitEstimationFailure;
  }

  const auto& report = std::get<belldist::EstimateReport>(result);
  nlohmann::ordered_json j;
  if (distill) {
    j = belldist::report_json(report, belldist::distilled_estimate(report));
  } else {
    j = belldist::report_json(report);
  }
  write_file(report_path, belldist::dump_json(j));
  std::cout << "q_hat = (" << belldist::format_g12(report.q_hat.q1) << ", "
            << belldist::format_g12(report.q_hat.q2) << ", "
            << belldist::format_g12(report.q_hat.q3) << ", "
            << belldist::format_g12(report.q_hat.q4) << ")\n";
  std::cout << "eps_t = " << belldist::format_g12(report.eps_t)
            << " delta_t = " << belldist::format_g12(report.delta_t)
            << (report.vacuous ? " (vacuous certificate)" : "") << "\n";
  std::cout << "wrote " << report_path.string() << "\n";
  return kExitOk;
}

int cmd_histogram(const CommonOpts& common, const std::optional<std::uint64_t>& n_flag,
                  const std::optional<int>& trials_flag,
                  const std::optional<double>& eps_z_flag,
                  const std::optional<double>& eps_x_flag,
                  const std::optional<double>& eps_xz_flag) {
  const ConfigView cfg = common.view();
  const auto q_vec = cfg.maybe<std::vector<double>>("q", common.q_opt());
  if (!q_vec) throw CliError(kExitIoError, "histogram requires --q");

  belldist::HistogramConfig config;
  config.q = state_from_vector(*q_vec);
  config.n = cfg.get<std::uint64_t>("n", n_flag, 10000);
  config.trials = cfg.get<int>("trials", trials_flag, 1000);
  config.master_seed = cfg.get<std::uint64_t>("seed", common.seed, 1);
  config.eps_z = cfg.get<double>("eps_z", eps_z_flag, 0.01);
  config.eps_x = cfg.get<double>("eps_x", eps_x_flag, 0.01);
  config.eps_xz = cfg.get<double>("eps_xz", eps_xz_flag, 0.01);
  config.workers = resolve_workers(cfg.get<int>("workers", common.workers, 0));
  const auto dir = prepare_out_dir(cfg.get<std::string>("out", common.out, "."));

  const belldist::HistogramResult result = belldist::run_histogram(config);

  write_file(dir / "histogram_distances.csv", belldist::histogram_distances_csv(result));
  write_file(dir / "histogram_summary.json",
             belldist::dump_json(belldist::histogram_summary_json(config, result)));

  std::cout << "trials=" << config.trials << " failures=" << result.failures << "\n";
  std::cout << "mean=" << belldist::format_g12(result.mean)
            << " std=" << belldist::format_g12(result.std_dev)
            << " bins=" << (result.bin_edges.empty() ? 0 : result.bin_edges.size() - 1)
            << "\n";
  std::cout << "wrote " << (dir / "histogram_distances.csv").string() << "\n";
  std::cout << "wrote " << (dir / "histogram_summary.json").string() << "\n";
  return kExitOk;
}

int cmd_plan(const CommonOpts& common, const std::optional<double>& delta_t_flag,
             const std::optional<double>& eps_flag, const std::optional<double>& eps1_flag,
             const std::optional<double>& eps2_flag, const std::optional<double>& eps3_flag) {
  const ConfigView cfg = common.view();
  const double delta_t = cfg.get<double>("delta_t", delta_t_flag, 1e-2);
  const auto eps_equal = cfg.maybe<double>("eps", eps_flag);
  const auto dir = prepare_out_dir(cfg.get<std::string>("out", common.out, "."));
  const auto plan_path = dir / "plan.json";

  if (eps_equal) {
    const std::uint64_t n = belldist::n_equal_eps(delta_t, *eps_equal);
    nlohmann::ordered_json j;
    j["schema_version"] = belldist::kReportSchemaVersion;
    j["status"] = "ok";
    j["mode"] = "equal_eps";
    j["delta_t"] = belldist::round_g12(delta_t);
    j["eps"] = belldist::round_g12(*eps_equal);
    j["n"] = n;
    j["total_pairs"] = 3 * n;
    write_file(plan_path, belldist::dump_json(j));
    std::cout << "n = " << n << " triplets (" << 3 * n << " pairs)\n";
    std::cout << "wrote " << plan_path.string() << "\n";
    return kExitOk;
  }

  const auto q_vec = cfg.maybe<std::vector<double>>("q", common.q_opt());
  if (!q_vec) {
    throw CliError(kExitIoError, "plan requires --eps (equal mode) or --q with eps targets");
  }
  belldist::PlanTarget target;
  target.delta_t_target = delta_t;
  target.eps1 = cfg.get<double>("eps1", eps1_flag, 1e-3);
  target.eps2 = cfg.get<double>("eps2", eps2_flag, 1e-3);
  target.eps3 = cfg.get<double>("eps3", eps3_flag, 5e-3);
  target.planning_state = state_from_vector(*q_vec);

  try {
    const belldist::Plan plan = belldist::budget_for_targets(target);
    const belldist::TomographyPlan tom = belldist::tomography_n(target);
    write_file(plan_path, belldist::dump_json(belldist::plan_json(plan, tom, target)));
    std::cout << "n = " << plan.budget.n << " triplets (" << 3 * plan.budget.n << " pairs), "
              << "tomography " << tom.n_per_basis << " per basis (" << tom.total_pairs
              << " pairs)\n";
    std::cout << "ratio = " << belldist::format_g12(plan.n_real / tom.n_real) << "\n";
    std::cout << "wrote " << plan_path.string() << "\n";
    return kExitOk;
  } catch (const belldist::NoFeasibleBudgetError& e) {
    nlohmann::ordered_json j;
    j["schema_version"] = belldist::kReportSchemaVersion;
    j["status"] = "infeasible";
    j["reason"] = e.what();
    write_file(plan_path, belldist::dump_json(j));
    std::cout << "infeasible plan: " << e.what() << "\n";
    std::cout << "wrote " << plan_path.string() << "\n";
    return kExitInfeasiblePlan;
  }
}

int cmd_scan(const CommonOpts& common, const std::optional<double>& delta_t_flag,
             const std::optional<double>& eps1_flag, const std::optional<double>& eps2_flag,
             const std::optional<double>& eps3_flag, const std::optional<double>& q1_min,
             const std::optional<double>& q1_max, const std::optional<double>& q1_step,
             const std::optional<double>& q2_min, const std::optional<double>& q2_max,
             const std::optional<double>& q2_step,
             const std::optional<std::uint64_t>& cell_begin,
             const std::optional<std::uint64_t>& cell_end) {
  const ConfigView cfg = common.view();
  belldist::ScanGrid grid;
  grid.q1_min = cfg.get<double>("q1_min", q1_min, 0.55);
  grid.q1_max = cfg.get<double>("q1_max", q1_max, 1.0);
  grid.q1_step = cfg.get<double>("q1_step", q1_step, 0.05);
  grid.q2_min = cfg.get<double>("q2_min", q2_min, 0.0);
  grid.q2_max = cfg.get<double>("q2_max", q2_max, 0.45);
  grid.q2_step = cfg.get<double>("q2_step", q2_step, 0.05);

  belldist::PlanTarget target;
  target.delta_t_target = cfg.get<double>("delta_t", delta_t_flag, 1e-2);
  target.eps1 = cfg.get<double>("eps1", eps1_flag, 1e-3);
  target.eps2 = cfg.get<double>("eps2", eps2_flag, 1e-3);
  target.eps3 = cfg.get<double>("eps3", eps3_flag, 5e-3);

  const auto begin = cfg.get<std::uint64_t>("cell_begin", cell_begin, 0);
  const auto end = cfg.get<std::uint64_t>("cell_end", cell_end, SIZE_MAX);
  const int workers = resolve_workers(cfg.get<int>("workers", common.workers, 0));
  const auto dir = prepare_out_dir(cfg.get<std::string>("out", common.out, "."));

  const auto cells = belldist::ratio_scan(grid, target, begin, end, workers);
  const auto csv_path = dir / "ratio_scan.csv";
  write_file(csv_path, belldist::scan_csv(cells));

  std::size_t infeasible = 0;
  for (const auto& cell : cells) infeasible += !cell.feasible;
  std::cout << "cells=" << cells.size() << " infeasible=" << infeasible << "\n";
  std::cout << "wrote " << csv_path.string() << "\n";
  return kExitOk;
}

int cmd_oracle_check(const CommonOpts& common, const std::optional<int>& states_flag) {
  const ConfigView cfg = common.view();
  const int states = cfg.get<int>("states", states_flag, 10000);
  const auto seed = cfg.get<std::uint64_t>("seed", common.seed, 1);
  if (states < 1) throw CliError(kExitIoError, "oracle-check requires states >= 1");

  belldist::RandomStream stream(seed);
  double worst_analytic = 0.0;
  double worst_sv = 0.0;
  // The statevector pass is the slow one; sampling it on a subset keeps the
  // default run fast while every state checks the enumeration.
  const int sv_stride = std::max(1, states / 500);
  for (int i = 0; i < states; ++i) {
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
    const BellDiagonalState q{e[0] / sum, e[1] / sum, e[2] / sum, e[3] / sum};
    const auto analytic = belldist::coincidence_probabilities(belldist::q_to_x(q));
    const auto numeric = belldist::enumerate_coincidence_probs(q);
    const double diff = std::max({std::abs(analytic.p_z - numeric.p_z),
                                  std::abs(analytic.p_x - numeric.p_x),
                                  std::abs(analytic.p_xz - numeric.p_xz)});
    double sv_diff = 0.0;
    if (i % sv_stride == 0) {
      const auto sv = belldist::statevector_probs(q);
      sv_diff = std::max({std::abs(sv.p_z - numeric.p_z), std::abs(sv.p_x - numeric.p_x),
                          std::abs(sv.p_xz - numeric.p_xz)});
    }
    worst_analytic = std::max(worst_analytic, diff);
    worst_sv = std::max(worst_sv, sv_diff);
    if (diff > 1e-12 || sv_diff > 1e-12) {
      std::cout << "MISMATCH at q = (" << belldist::format_g12(q.q1) << ", "
                << belldist::format_g12(q.q2) << ", " << belldist::format_g12(q.q3) << ", "
                << belldist::format_g12(q.q4) << "): analytic diff "
                << belldist::format_g12(diff) << ", statevector diff "
                << belldist::format_g12(sv_diff) << "\n";
      return kExitOracleMismatch;
    }
  }
  std::cout << "oracle check passed on " << states << " states (seed " << seed << ")\n";
  std::cout << "max |analytic - enumeration| = " << belldist::format_g12(worst_analytic)
            << "\n";
  std::cout << "max |statevector - enumeration| = " << belldist::format_g12(worst_sv) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double selection distillation simulator and Bell-diagonal state estimator"};
  app.require_subcommand(1);

  CommonOpts probe_opts;
  CLI::App* probe = app.add_subcommand("probe", "analytic vs enumerated probabilities of q");
  add_common(probe, probe_opts);

  CommonOpts sim_opts;
  std::optional<std::uint64_t> sim_n;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a record file");
  add_common(simulate, sim_opts);
  simulate->add_option("--n", sim_n, "triplets to simulate");

  CommonOpts est_opts;
  std::optional<std::uint64_t> est_n;
  std::optional<std::string> est_records;
  std::optional<double> est_eps_z, est_eps_x, est_eps_xz;
  bool est_distill = false;
  CLI::App* estimate = app.add_subcommand("estimate", "run the estimation protocol");
  add_common(estimate, est_opts);
  estimate->add_option("--n", est_n, "triplets to simulate (with --q)");
  estimate->add_option("--records", est_records, "record CSV to estimate from");
  estimate->add_option("--eps-z", est_eps_z, "Hoeffding error on p_z (default 0.01)");
  estimate->add_option("--eps-x", est_eps_x, "Hoeffding error on p_x (default 0.01)");
  estimate->add_option("--eps-xz", est_eps_xz, "Hoeffding error on p_xz (default 0.01)");
  estimate->add_flag("--distill", est_distill, "append the distilled-state estimate");

  CommonOpts hist_opts;
  std::optional<std::uint64_t> hist_n;
  std::optional<int> hist_trials;
  std::optional<double> hist_eps_z, hist_eps_x, hist_eps_xz;
  CLI::App* histogram = app.add_subcommand("histogram", "trace-distance distribution over trials");
  add_common(histogram, hist_opts);
  histogram->add_option("--n", hist_n, "triplets per trial");
  histogram->add_option("--trials", hist_trials, "number of trials");
  histogram->add_option("--eps-z", hist_eps_z, "Hoeffding error on p_z");
  histogram->add_option("--eps-x", hist_eps_x, "Hoeffding error on p_x");
  histogram->add_option("--eps-xz", hist_eps_xz, "Hoeffding error on p_xz");

  CommonOpts plan_opts;
  std::optional<double> plan_delta_t, plan_eps, plan_eps1, plan_eps2, plan_eps3;
  CLI::App* plan = app.add_subcommand("plan", "sample-size planning");
  add_common(plan, plan_opts);
  plan->add_option("--delta-t", plan_delta_t, "certificate failure probability (default 0.01)");
  plan->add_option("--eps", plan_eps, "equal probability error (closed-form mode)");
  plan->add_option("--eps1", plan_eps1, "x1 accuracy target (default 1e-3)");
  plan->add_option("--eps2", plan_eps2, "x2 accuracy target (default 1e-3)");
  plan->add_option("--eps3", plan_eps3, "x3 accuracy target (default 5e-3)");

  CommonOpts scan_opts;
  std::optional<double> scan_delta_t, scan_eps1, scan_eps2, scan_eps3;
  std::optional<double> scan_q1_min, scan_q1_max, scan_q1_step;
  std::optional<double> scan_q2_min, scan_q2_max, scan_q2_step;
  std::optional<std::uint64_t> scan_begin, scan_end;
  CLI::App* scan = app.add_subcommand("scan", "resource-ratio scan over a (q1,q2) grid");
  add_common(scan, scan_opts, /*with_q=*/false);
  scan->add_option("--delta-t", scan_delta_t, "certificate failure probability");
  scan->add_option("--eps1", scan_eps1, "x1 accuracy target");
  scan->add_option("--eps2", scan_eps2, "x2 accuracy target");
  scan->add_option("--eps3", scan_eps3, "x3 accuracy target");
  scan->add_option("--q1-min", scan_q1_min, "grid q1 start (default 0.55)");
  scan->add_option("--q1-max", scan_q1_max, "grid q1 end (default 1.0)");
  scan->add_option("--q1-step", scan_q1_step, "grid q1 step (default 0.05)");
  scan->add_option("--q2-min", scan_q2_min, "grid q2 start (default 0)");
  scan->add_option("--q2-max", scan_q2_max, "grid q2 end (default 0.45)");
  scan->add_option("--q2-step", scan_q2_step, "grid q2 step (default 0.05)");
  scan->add_option("--cell-begin", scan_begin, "first cell index (resumable runs)");
  scan->add_option("--cell-end", scan_end, "one past the last cell index");

  CommonOpts oracle_opts;
  std::optional<int> oracle_states;
  CLI::App* oracle = app.add_subcommand("oracle-check", "differential test of the three models");
  add_common(oracle, oracle_opts, /*with_q=*/false);
  oracle->add_option("--states", oracle_states, "random states to test (default 10000)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (probe->parsed()) return cmd_probe(probe_opts);
    if (simulate->parsed()) return cmd_simulate(sim_opts, sim_n);
    if (estimate->parsed()) {
      return cmd_estimate(est_opts, est_n, est_records, est_eps_z, est_eps_x, est_eps_xz,
                          est_distill);
    }
    if (histogram->parsed()) {
      return cmd_histogram(hist_opts, hist_n, hist_trials, hist_eps_z, hist_eps_x,
                           hist_eps_xz);
    }
    if (plan->parsed()) {
      return cmd_plan(plan_opts, plan_delta_t, plan_eps, plan_eps1, plan_eps2, plan_eps3);
    }
    if (scan->parsed()) {
      return cmd_scan(scan_opts, scan_delta_t, scan_eps1, scan_eps2, scan_eps3, scan_q1_min,
                      scan_q1_max, scan_q1_step, scan_q2_min, scan_q2_max, scan_q2_step,
                      scan_begin, scan_end);
    }
    if (oracle->parsed()) return cmd_oracle_check(oracle_opts, oracle_states);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const belldist::NormalizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitOk;
}
