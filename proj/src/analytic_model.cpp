#include "belldist/analytic_model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace belldist {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_unit_interval(double v, const char* name) {
  if (!(v >= -kNormTolerance && v <= 1.0 + kNormTolerance)) {
    std::ostringstream msg;
    msg << name << " = " << v << " outside [0,1]";
    throw std::domain_error(msg.str());
  }
}

// Snap values marginally above 1 back onto the boundary; reject the rest
// of (1, inf). Values at or below 1/2 are inadmissible by the q1 > 1/2
// assumption and are the caller's error to raise.
double snap_upper(double x, const char* what) {
  if (x > 1.0) {
    if (x <= 1.0 + kBoundarySnap) return 1.0;
    std::ostringstream msg;
    msg << what << " = " << x << " outside (1/2,1]";
    throw InversionDomainError(msg.str());
  }
  return x;
}

}  // namespace

double p_z(double x1) {
  require_unit_interval(x1, "x1");
  return x1 * (3.0 + x1 * (-6.0 + 4.0 * x1));
}

double p_x(double x2) {
  require_unit_interval(x2, "x2");
  return 1.0 + x2 * (-2.0 + 2.0 * x2);
}

double p_xz(const XVector& x) {
  require_unit_interval(x.x1, "x1");
  require_unit_interval(x.x2, "x2");
  require_unit_interval(x.x3, "x3");
  return 2.0 * x.x1 - 3.0 * x.x1 * x.x1 + 2.0 * x.x1 * x.x1 * x.x1 - x.x2 + x.x2 * x.x2 +
         x.x3 - 2.0 * x.x1 * x.x3 - x.x3 * x.x3 + 2.0 * x.x1 * x.x3 * x.x3;
}

CoincidenceProbabilities coincidence_probabilities(const XVector& x) {
  return CoincidenceProbabilities{p_z(x.x1), p_x(x.x2), p_xz(x)};
}

double eval_x1(double p_z_val) {
  return 0.5 * (1.0 + std::cbrt(2.0 * p_z_val - 1.0));
}

double eval_x2(double p_x_val) {
  const double radicand = 2.0 * p_x_val - 1.0;
  if (radicand < 0.0) return kNaN;
  return 0.5 * (1.0 + std::sqrt(radicand));
}

double eval_x3(double p_z_val, double p_x_val, double p_xz_val) {
  const double denom = std::cbrt(2.0 * p_z_val - 1.0);
  if (!(denom > 0.0)) return kNaN;
  const double radicand = (4.0 * p_xz_val - 2.0 * p_z_val - 2.0 * p_x_val + 1.0) / denom;
  if (radicand < 0.0) return kNaN;
  return 0.5 * (1.0 + std::sqrt(radicand));
}

double invert_x1(double p_z_hat) {
  if (!(p_z_hat > 0.5)) {
    std::ostringstream msg;
    msg << "p_z = " << p_z_hat << " <= 1/2: x1 leaves (1/2,1]";
    throw InversionDomainError(msg.str());
  }
  return snap_upper(eval_x1(p_z_hat), "x1");
}

double invert_x2(double p_x_hat) {
  if (!(p_x_hat > 0.5)) {
    std::ostringstream msg;
    msg << "p_x = " << p_x_hat << " <= 1/2: x2 leaves (1/2,1]";
    throw InversionDomainError(msg.str());
  }
  return snap_upper(eval_x2(p_x_hat), "x2");
}

double invert_x3(const CoincidenceProbabilities& p_hat) {
  if (!(p_hat.p_z > 0.5)) {
    std::ostringstream msg;
    msg << "p_z = " << p_hat.p_z << " <= 1/2: x3 undefined";
    throw InversionDomainError(msg.str());
  }
  const double denom = std::cbrt(2.0 * p_hat.p_z - 1.0);
  const double radicand = (4.0 * p_hat.p_xz - 2.0 * p_hat.p_z - 2.0 * p_hat.p_x + 1.0) / denom;
  if (radicand < 0.0) {
    std::ostringstream msg;
    msg << "negative radicand " << radicand << " in x3 inversion";
    throw InversionDomainError(msg.str());
  }
  const double x3 = snap_upper(0.5 * (1.0 + std::sqrt(radicand)), "x3");
  if (!(x3 > 0.5)) {
    std::ostringstream msg;
    msg << "x3 = " << x3 << " outside (1/2,1]";
    throw InversionDomainError(msg.str());
  }
  return x3;
}

}  // namespace belldist
