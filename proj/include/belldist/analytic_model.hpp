#pragma once

#include <stdexcept>

#include "belldist/bell_state.hpp"

namespace belldist {

// True or empirical coincidence probabilities of one double selection round:
// p_z = P(Z outcomes of the ancilla pair coincide), p_x likewise for X, and
// p_xz = P(both), the success probability of the round.
struct CoincidenceProbabilities {
  double p_z = 1.0;
  double p_x = 1.0;
  double p_xz = 1.0;
};

// Raised when an inversion is fed data outside the regime where the
// closed forms return a value in (1/2, 1]. The estimator turns this into
// its structured failure result rather than crashing.
class InversionDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Results within this distance of the x = 1 boundary are snapped onto it;
// beyond it the inversion errors. Empirical probabilities can land
// arbitrarily close to the boundary, so a strict check would be noise.
inline constexpr double kBoundarySnap = 1e-9;

// Coincidence probability of the Z check: 3*x1 - 6*x1^2 + 4*x1^3.
// Strictly increasing on (1/2, 1]. Throws std::domain_error off [0,1].
double p_z(double x1);

// Coincidence probability of the X check: 1 - 2*x2 + 2*x2^2.
double p_x(double x2);

// Joint coincidence probability; the only multivariate one.
double p_xz(const XVector& x);

// All three at once.
CoincidenceProbabilities coincidence_probabilities(const XVector& x);

// Inversions back to x, each exact on the admissible interval:
//   x1 = (1 + (2 p_z - 1)^{1/3}) / 2
//   x2 = (1 + (2 p_x - 1)^{1/2}) / 2
//   x3 = (1 + sqrt((4 p_xz - 2 p_z - 2 p_x + 1) / (2 p_z - 1)^{1/3})) / 2
// Throw InversionDomainError when the marginal is <= 1/2, the radicand is
// negative, or the result leaves (1/2, 1] beyond kBoundarySnap.
double invert_x1(double p_z_hat);
double invert_x2(double p_x_hat);
double invert_x3(const CoincidenceProbabilities& p_hat);

// Unchecked evaluations of the inversion formulas, used by the confidence
// band construction whose clamped arguments may sit on the domain boundary.
// They return NaN instead of throwing when the expression leaves the reals.
double eval_x1(double p_z_val);
double eval_x2(double p_x_val);
double eval_x3(double p_z_val, double p_x_val, double p_xz_val);

}  // namespace belldist
