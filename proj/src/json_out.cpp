#include "belldist/json_out.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace belldist {

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round_g12(double v) { return std::strtod(format_g12(v).c_str(), nullptr); }

nlohmann::ordered_json state_json(const BellDiagonalState& q) {
  return nlohmann::ordered_json::array(
      {round_g12(q.q1), round_g12(q.q2), round_g12(q.q3), round_g12(q.q4)});
}

nlohmann::ordered_json probs_json(const CoincidenceProbabilities& p) {
  nlohmann::ordered_json j;
  j["p_z"] = round_g12(p.p_z);
  j["p_x"] = round_g12(p.p_x);
  j["p_xz"] = round_g12(p.p_xz);
  return j;
}

namespace {

nlohmann::ordered_json band_json(const ParamBand& band) {
  nlohmann::ordered_json j;
  j["eps_left"] = round_g12(band.eps_left);
  j["eps_right"] = round_g12(band.eps_right);
  j["eps"] = round_g12(band.eps);
  j["delta"] = round_g12(band.delta);
  return j;
}

nlohmann::ordered_json budget_json(const ErrorBudget& budget) {
  nlohmann::ordered_json j;
  j["eps_z"] = round_g12(budget.eps_z);
  j["eps_x"] = round_g12(budget.eps_x);
  j["eps_xz"] = round_g12(budget.eps_xz);
  j["n"] = budget.n;
  return j;
}

}  // namespace

nlohmann::ordered_json report_json(const EstimateReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["status"] = "ok";
  j["q_hat"] = state_json(report.q_hat);
  j["x_hat"] = nlohmann::ordered_json::array(
      {round_g12(report.x_hat.x1), round_g12(report.x_hat.x2), round_g12(report.x_hat.x3)});
  j["bands"] = nlohmann::ordered_json::array(
      {band_json(report.bands[0]), band_json(report.bands[1]), band_json(report.bands[2])});
  j["eps_t"] = round_g12(report.eps_t);
  j["delta_t"] = round_g12(report.delta_t);
  j["delta_t_raw"] = round_g12(report.delta_t_raw);
  j["vacuous_certificate"] = report.vacuous;
  j["p_hat"] = probs_json(report.p_hat);
  j["budget"] = budget_json(report.budget);
  j["master_seed"] = report.master_seed;
  return j;
}

nlohmann::ordered_json report_json(const EstimateReport& report,
                                   const std::optional<DistilledEstimate>& distilled) {
  nlohmann::ordered_json j = report_json(report);
  if (distilled) {
    nlohmann::ordered_json d;
    d["q_d_hat"] = state_json(distilled->q_d_hat);
    d["pi_hat"] = round_g12(distilled->pi_hat);
    d["eps_d"] = round_g12(distilled->eps_d);
    j["distilled"] = d;
  } else {
    j["distilled"] = nullptr;
    j["distilled_status"] = "not_certifiable";
  }
  return j;
}

nlohmann::ordered_json failure_json(const EstimationFailure& failure) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["status"] = "estimation_failure";
  j["failed_x"] =
      nlohmann::ordered_json::array({failure.failed_x[0], failure.failed_x[1], failure.failed_x[2]});
  j["eps_t"] = round_g12(failure.eps_t);
  j["delta_t"] = round_g12(failure.delta_t);
  j["p_hat"] = probs_json(failure.p_hat);
  j["reason"] = failure.reason;
  return j;
}

nlohmann::ordered_json plan_json(const Plan& plan, const TomographyPlan& tom,
                                 const PlanTarget& target) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["status"] = "ok";
  j["targets"] = {{"delta_t", round_g12(target.delta_t_target)},
                  {"eps1", round_g12(target.eps1)},
                  {"eps2", round_g12(target.eps2)},
                  {"eps3", round_g12(target.eps3)}};
  j["planning_state"] = state_json(target.planning_state);
  j["budget"] = budget_json(plan.budget);
  j["n_real"] = round_g12(plan.n_real);
  j["total_pairs"] = 3 * plan.budget.n;
  j["planning_p"] = probs_json(plan.planning_p);
  j["achieved_widths"] =
      nlohmann::ordered_json::array({round_g12(plan.achieved_widths[0]),
                                     round_g12(plan.achieved_widths[1]),
                                     round_g12(plan.achieved_widths[2])});
  j["achieved_delta_t"] = round_g12(plan.achieved_delta_t);
  j["tomography"] = {{"n_per_basis", tom.n_per_basis},
                     {"n_real", round_g12(tom.n_real)},
                     {"total_pairs", tom.total_pairs}};
  j["ratio"] = round_g12(plan.n_real / tom.n_real);
  return j;
}

nlohmann::ordered_json histogram_summary_json(const HistogramConfig& config,
                                              const HistogramResult& result) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["q"] = state_json(config.q);
  j["n"] = config.n;
  j["trials"] = config.trials;
  j["master_seed"] = config.master_seed;
  j["eps"] = {{"eps_z", round_g12(config.eps_z)},
              {"eps_x", round_g12(config.eps_x)},
              {"eps_xz", round_g12(config.eps_xz)}};
  j["failures"] = result.failures;
  j["mean"] = round_g12(result.mean);
  j["std_dev"] = round_g12(result.std_dev);
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (double e : result.bin_edges) edges.push_back(round_g12(e));
  j["bin_edges"] = edges;
  j["bin_counts"] = result.counts;
  return j;
}

std::string histogram_distances_csv(const HistogramResult& result) {
  std::ostringstream out;
  out << "trial,distance,status\n";
  for (std::size_t t = 0; t < result.distances.size(); ++t) {
    if (result.ok[t]) {
      out << t << ',' << format_g12(result.distances[t]) << ",ok\n";
    } else {
      out << t << ",,failed\n";
    }
  }
  return out.str();
}

std::string scan_csv(const std::vector<ScanCell>& cells) {
  std::ostringstream out;
  out << "q1,q2,n_ds_total,n_tom_total,ratio,status\n";
  for (const ScanCell& cell : cells) {
    out << format_g12(cell.q1) << ',' << format_g12(cell.q2) << ',';
    if (cell.feasible) {
      out << format_g12(cell.n_ds_total) << ',' << format_g12(cell.n_tom_total) << ','
          << format_g12(cell.ratio) << ",ok";
    } else {
      out << ",,,infeasible";
    }
    if (cell.werner) out << ";werner";
    out << '\n';
  }
  return out.str();
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace belldist
