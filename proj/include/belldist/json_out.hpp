#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "belldist/estimator.hpp"
#include "belldist/histogram.hpp"
#include "belldist/planner.hpp"

namespace belldist {

inline constexpr int kReportSchemaVersion = 1;

// All floating output goes through 12 significant digits so repeated runs
// diff cleanly byte for byte.
std::string format_g12(double v);
// The double nearest to the 12-digit rendering, for storing in JSON numbers.
double round_g12(double v);

nlohmann::ordered_json state_json(const BellDiagonalState& q);
nlohmann::ordered_json probs_json(const CoincidenceProbabilities& p);

// {"status":"ok", q_hat, x_hat, bands, eps_t, delta_t, ...}
nlohmann::ordered_json report_json(const EstimateReport& report);
nlohmann::ordered_json report_json(const EstimateReport& report,
                                   const std::optional<DistilledEstimate>& distilled);
// {"status":"estimation_failure", failed_x, eps_t: 1, delta_t: 1, ...}
nlohmann::ordered_json failure_json(const EstimationFailure& failure);

nlohmann::ordered_json plan_json(const Plan& plan, const TomographyPlan& tom,
                                 const PlanTarget& target);

nlohmann::ordered_json histogram_summary_json(const HistogramConfig& config,
                                              const HistogramResult& result);

// CSV "trial,distance,status"; failed trials keep an empty distance cell.
std::string histogram_distances_csv(const HistogramResult& result);

// CSV "q1,q2,n_ds_total,n_tom_total,ratio,status"; status is ok or
// infeasible with ";werner" appended on the Werner line.
std::string scan_csv(const std::vector<ScanCell>& cells);

// dump(2) plus trailing newline.
std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace belldist
