#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace belldist {

// Tolerance on |q1+q2+q3+q4 - 1| accepted as normalized.
inline constexpr double kNormTolerance = 1e-12;

class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Convex coefficients of a state diagonal in the Bell basis
// {Phi+, Phi-, Psi+, Psi-}. q1 is the Phi+ weight (the fidelity).
//
// The struct itself does not enforce physicality: estimation can produce
// normalized vectors with components outside [0,1], and those must stay
// observable. Callers that need a probability vector check is_physical().
struct BellDiagonalState {
  double q1 = 1.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;

  double sum() const { return q1 + q2 + q3 + q4; }
  std::array<double, 4> coeffs() const { return {q1, q2, q3, q4}; }

  bool is_normalized(double tol = kNormTolerance) const;
  bool is_physical(double tol = kNormTolerance) const;
  // Physical and q1 > 1/2, the regime the estimator is defined on.
  bool is_estimator_admissible() const;
};

// Transformed parameters x_i = q1 + q_{i+1}.
struct XVector {
  double x1 = 1.0;
  double x2 = 1.0;
  double x3 = 1.0;

  // All components in (1/2, 1].
  bool is_admissible() const;
};

// Pauli-frame encoding of the Bell basis: phase bit a and flip bit b with
// Phi+ = (0,0), Phi- = (1,0), Psi+ = (0,1), Psi- = (1,1). Under a state q,
// P(b=0) = x1, P(a=0) = x2, P(a=b) = x3. This convention is the single
// source of truth for the frame enumeration and the trial engine.
struct BellLabel {
  std::uint8_t phase_bit = 0;
  std::uint8_t flip_bit = 0;

  // Index in the fixed order Phi+, Phi-, Psi+, Psi-.
  int index() const { return phase_bit + 2 * flip_bit; }
  static BellLabel from_index(int k);
  const char* name() const;

  friend bool operator==(const BellLabel&, const BellLabel&) = default;
};

// Throws NormalizationError when the state is not normalized to kNormTolerance.
void validate_normalized(const BellDiagonalState& state);
// Additionally requires all components in [0,1].
void validate_physical(const BellDiagonalState& state);

// x_i = q1 + q_{i+1}. Requires a normalized state.
XVector q_to_x(const BellDiagonalState& state);

// Exact inverse of q_to_x. Total: never clamps, so inconsistent x produce
// a normalized but possibly non-physical state.
BellDiagonalState x_to_q(const XVector& x);

// Half the l1 distance between coefficient vectors; equals the trace
// distance of the corresponding Bell-diagonal density operators.
double trace_distance(const BellDiagonalState& a, const BellDiagonalState& b);

// Pauli correlators t_sigma = Tr[(sigma x sigma) rho].
struct Correlators {
  double t_x = 0.0;
  double t_y = 0.0;
  double t_z = 0.0;
};
Correlators correlators(const BellDiagonalState& state);

}  // namespace belldist
