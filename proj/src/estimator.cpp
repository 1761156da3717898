#include "belldist/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace belldist {

namespace {

double clamp_lo(double v, double lo) { return v < lo ? lo : v; }
double clamp_hi(double v, double hi) { return v > hi ? hi : v; }

}  // namespace

void ErrorBudget::validate() const {
  if (n < 1) throw std::domain_error("error budget requires n >= 1");
  for (double e : {eps_z, eps_x, eps_xz}) {
    if (!(e > 0.0 && e < 1.0)) {
      std::ostringstream msg;
      msg << "probability error " << e << " outside (0,1)";
      throw std::domain_error(msg.str());
    }
  }
}

double hoeffding_delta(std::uint64_t n, double eps) {
  if (n < 1) throw std::domain_error("hoeffding_delta requires n >= 1");
  if (!(eps > 0.0)) throw std::domain_error("hoeffding_delta requires eps > 0");
  return std::min(1.0, 2.0 * std::exp(-2.0 * static_cast<double>(n) * eps * eps));
}

ParamBand band_x1(double p_hat_z, double eps_z, std::uint64_t n) {
  const double x_hat = invert_x1(p_hat_z);
  const double upper = eval_x1(clamp_hi(p_hat_z + eps_z, 1.0));
  const double lower = eval_x1(clamp_lo(p_hat_z - eps_z, 0.5));
  ParamBand band;
  band.eps_right = std::max(0.0, upper - x_hat);
  band.eps_left = std::max(0.0, x_hat - lower);
  band.eps = std::max(band.eps_left, band.eps_right);
  band.delta = hoeffding_delta(n, eps_z);
  return band;
}

ParamBand band_x2(double p_hat_x, double eps_x, std::uint64_t n) {
  const double x_hat = invert_x2(p_hat_x);
  const double upper = eval_x2(clamp_hi(p_hat_x + eps_x, 1.0));
  const double lower = eval_x2(clamp_lo(p_hat_x - eps_x, 0.5));
  ParamBand band;
  band.eps_right = std::max(0.0, upper - x_hat);
  band.eps_left = std::max(0.0, x_hat - lower);
  band.eps = std::max(band.eps_left, band.eps_right);
  band.delta = hoeffding_delta(n, eps_x);
  return band;
}

ParamBand band_x3(const CoincidenceProbabilities& p_hat, const ErrorBudget& budget) {
  budget.validate();
  const double x_hat = invert_x3(p_hat);

  const double upper = eval_x3(clamp_lo(p_hat.p_z - budget.eps_z, 0.5),
                               clamp_lo(p_hat.p_x - budget.eps_x, 0.5),
                               clamp_hi(p_hat.p_xz + budget.eps_xz, 1.0));
  if (std::isnan(upper)) {
    throw InversionDomainError("x3 upper-bound corner leaves the reals");
  }
  const double lower = eval_x3(clamp_hi(p_hat.p_z + budget.eps_z, 1.0),
                               clamp_hi(p_hat.p_x + budget.eps_x, 1.0),
                               clamp_lo(p_hat.p_xz - budget.eps_xz, 0.25));
  if (std::isnan(lower)) {
    throw InversionDomainError("x3 lower-bound corner leaves the reals (negative radicand)");
  }

  ParamBand band;
  band.eps_right = std::max(0.0, clamp_hi(upper, 1.0) - x_hat);
  band.eps_left = std::max(0.0, x_hat - lower);
  band.eps = std::max(band.eps_left, band.eps_right);
  band.delta = hoeffding_delta(budget.n, budget.eps_z) +
               hoeffding_delta(budget.n, budget.eps_x) +
               hoeffding_delta(budget.n, budget.eps_xz);
  return band;
}

EstimateResult estimate(const RunSummary& summary, double eps_z, double eps_x, double eps_xz) {
  if (summary.n < 1) throw std::invalid_argument("estimate requires a summary with n >= 1");
  if (summary.count_xz > std::min(summary.count_z, summary.count_x) ||
      std::max(summary.count_z, summary.count_x) > summary.n) {
    throw std::invalid_argument("estimate got inconsistent coincidence counts");
  }
  const ErrorBudget budget{eps_z, eps_x, eps_xz, summary.n};
  budget.validate();
  const CoincidenceProbabilities p_hat = summary.empirical();

  EstimationFailure failure;
  failure.p_hat = p_hat;
  std::ostringstream reasons;

  XVector x_hat;
  std::array<ParamBand, 3> bands;
  try {
    bands[0] = band_x1(p_hat.p_z, eps_z, summary.n);
    x_hat.x1 = invert_x1(p_hat.p_z);
  } catch (const InversionDomainError& e) {
    failure.failed_x[0] = true;
    reasons << "x1: " << e.what() << "; ";
  }
  try {
    bands[1] = band_x2(p_hat.p_x, eps_x, summary.n);
    x_hat.x2 = invert_x2(p_hat.p_x);
  } catch (const InversionDomainError& e) {
    failure.failed_x[1] = true;
    reasons << "x2: " << e.what() << "; ";
  }
  try {
    bands[2] = band_x3(p_hat, budget);
    x_hat.x3 = invert_x3(p_hat);
  } catch (const InversionDomainError& e) {
    failure.failed_x[2] = true;
    reasons << "x3: " << e.what() << "; ";
  }

  if (failure.failed_x[0] || failure.failed_x[1] || failure.failed_x[2]) {
    failure.reason = reasons.str();
    return failure;
  }

  EstimateReport report;
  report.x_hat = x_hat;
  report.q_hat = x_to_q(x_hat);
  report.bands = bands;
  report.eps_t = bands[0].eps + bands[1].eps + bands[2].eps;
  report.delta_t_raw = bands[0].delta + bands[1].delta + bands[2].delta;
  report.delta_t = std::min(1.0, report.delta_t_raw);
  report.vacuous = report.delta_t_raw >= 1.0;
  report.p_hat = p_hat;
  report.budget = budget;
  report.master_seed = summary.master_seed;
  return report;
}

std::optional<DistilledEstimate> distilled_estimate(const EstimateReport& report) {
  const DistillationResult mapped = distilled_map(report.q_hat);
  const double margin = mapped.pi_xz - 2.0 * report.eps_t;
  if (!(margin > 0.0)) return std::nullopt;
  return DistilledEstimate{mapped.survivor_state, mapped.pi_xz, 2.0 * report.eps_t / margin};
}

}  // namespace belldist
