#include "belldist/bell_state.hpp"

#include <cmath>
#include <sstream>

namespace belldist {

bool BellDiagonalState::is_normalized(double tol) const {
  return std::abs(sum() - 1.0) <= tol;
}

bool BellDiagonalState::is_physical(double tol) const {
  if (!is_normalized(tol)) return false;
  for (double q : coeffs()) {
    if (q < -tol || q > 1.0 + tol) return false;
  }
  return true;
}

bool BellDiagonalState::is_estimator_admissible() const {
  return is_physical() && q1 > 0.5;
}

bool XVector::is_admissible() const {
  return x1 > 0.5 && x1 <= 1.0 && x2 > 0.5 && x2 <= 1.0 && x3 > 0.5 && x3 <= 1.0;
}

BellLabel BellLabel::from_index(int k) {
  return BellLabel{static_cast<std::uint8_t>(k & 1), static_cast<std::uint8_t>((k >> 1) & 1)};
}

const char* BellLabel::name() const {
  static constexpr const char* kNames[4] = {"Phi+", "Phi-", "Psi+", "Psi-"};
  return kNames[index()];
}

void validate_normalized(const BellDiagonalState& state) {
  if (!state.is_normalized()) {
    std::ostringstream msg;
    msg << "state not normalized: q sums to " << state.sum();
    throw NormalizationError(msg.str());
  }
}

void validate_physical(const BellDiagonalState& state) {
  validate_normalized(state);
  if (!state.is_physical()) {
    std::ostringstream msg;
    msg << "state has components outside [0,1]: (" << state.q1 << ", " << state.q2 << ", "
        << state.q3 << ", " << state.q4 << ")";
    throw NormalizationError(msg.str());
  }
}

XVector q_to_x(const BellDiagonalState& state) {
  validate_normalized(state);
  return XVector{state.q1 + state.q2, state.q1 + state.q3, state.q1 + state.q4};
}

BellDiagonalState x_to_q(const XVector& x) {
  return BellDiagonalState{
      0.5 * (-1.0 + x.x1 + x.x2 + x.x3),
      0.5 * (1.0 + x.x1 - x.x2 - x.x3),
      0.5 * (1.0 - x.x1 + x.x2 - x.x3),
      0.5 * (1.0 - x.x1 - x.x2 + x.x3),
  };
}

double trace_distance(const BellDiagonalState& a, const BellDiagonalState& b) {
  validate_normalized(a);
  validate_normalized(b);
  return 0.5 * (std::abs(a.q1 - b.q1) + std::abs(a.q2 - b.q2) + std::abs(a.q3 - b.q3) +
                std::abs(a.q4 - b.q4));
}

Correlators correlators(const BellDiagonalState& state) {
  validate_normalized(state);
  return Correlators{
      state.q1 - state.q2 + state.q3 - state.q4,
      -state.q1 + state.q2 + state.q3 - state.q4,
      state.q1 + state.q2 - state.q3 - state.q4,
  };
}

}  // namespace belldist
