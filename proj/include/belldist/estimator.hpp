#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "belldist/analytic_model.hpp"
#include "belldist/bell_state.hpp"
#include "belldist/exact_oracle.hpp"
#include "belldist/trial_engine.hpp"

namespace belldist {

// Per-probability additive errors chosen for the Hoeffding bounds, plus the
// triplet count they will be evaluated at.
struct ErrorBudget {
  double eps_z = 0.0;
  double eps_x = 0.0;
  double eps_xz = 0.0;
  std::uint64_t n = 0;

  // Each eps in (0,1), n >= 1. Throws std::domain_error.
  void validate() const;
};

// Two-sided confidence band of one transformed parameter: eps_left bounds
// the overshoot of the point estimate, eps_right the undershoot, eps is
// their max, and delta bounds the probability that the band misses.
struct ParamBand {
  double eps_left = 0.0;
  double eps_right = 0.0;
  double eps = 0.0;
  double delta = 0.0;
};

struct EstimateReport {
  BellDiagonalState q_hat;
  XVector x_hat;
  std::array<ParamBand, 3> bands;
  double eps_t = 0.0;        // band eps sum; trace-distance bound
  double delta_t = 0.0;      // failure probability, clamped to 1
  double delta_t_raw = 0.0;  // unclamped sum of the band deltas
  bool vacuous = false;      // true when delta_t_raw >= 1
  CoincidenceProbabilities p_hat;
  ErrorBudget budget;
  std::uint64_t master_seed = 0;
};

// Structured failure of the estimation protocol: some x_i evaluated at the
// data (or at a band corner) is not a real number in (1/2, 1].
struct EstimationFailure {
  std::array<bool, 3> failed_x{false, false, false};
  double eps_t = 1.0;
  double delta_t = 1.0;
  CoincidenceProbabilities p_hat;
  std::string reason;
};

using EstimateResult = std::variant<EstimateReport, EstimationFailure>;

inline bool succeeded(const EstimateResult& r) {
  return std::holds_alternative<EstimateReport>(r);
}

// min(1, 2 exp(-2 n eps^2)). Throws std::domain_error on n < 1 or eps <= 0.
double hoeffding_delta(std::uint64_t n, double eps);

// Confidence band for x1 from the Z-coincidence marginal. The corners are
// the clamped perturbations min{p+eps,1} and max{p-eps,1/2}; the right side
// collapses to zero once the upper clamp engages. delta = hoeffding_delta.
// Throws InversionDomainError when the point estimate is inadmissible.
ParamBand band_x1(double p_hat_z, double eps_z, std::uint64_t n);

// Mirror construction for x2 with the square root in place of the cube root.
ParamBand band_x2(double p_hat_x, double eps_x, std::uint64_t n);

// Band for x3, which inherits all three probability uncertainties: the
// upper corner evaluates at (max{p_z-eps_z,1/2}, max{p_x-eps_x,1/2},
// min{p_xz+eps_xz,1}), the lower at (min{p_z+eps_z,1}, min{p_x+eps_x,1},
// max{p_xz-eps_xz,1/4}). Upper values beyond 1 truncate to 1 (x3 <= 1 a
// priori). Throws InversionDomainError when a corner leaves the reals.
// delta is the sum of the three Hoeffding deltas.
ParamBand band_x3(const CoincidenceProbabilities& p_hat, const ErrorBudget& budget);

// The full estimation protocol on one run's statistics. Success yields the
// report with eps_t and delta_t as the exact sums of their parts; failure
// yields the structured result with eps_t = delta_t = 1 and the offending
// parameters flagged.
EstimateResult estimate(const RunSummary& summary, double eps_z, double eps_x, double eps_xz);

struct DistilledEstimate {
  BellDiagonalState q_d_hat;  // distilled_map applied to q_hat, normalized
  double pi_hat = 0.0;        // success weight of the map at q_hat
  double eps_d = 0.0;         // 2 eps_t / (pi_hat - 2 eps_t)
};

// Post-processing step: the distilled state inherits the undistilled
// certificate with error eps_d at unchanged delta_t. Returns nullopt when
// pi_hat - 2 eps_t <= 0 and no certificate can be issued.
std::optional<DistilledEstimate> distilled_estimate(const EstimateReport& report);

}  // namespace belldist
