#pragma once

#include <stdexcept>
#include <string>

#include "belldist/analytic_model.hpp"
#include "belldist/bell_state.hpp"

namespace belldist {

// Bell-frame labels of the three pairs consumed by one round:
// pair0 survives, pair1 is Z-measured, pair2 is X-measured.
struct FrameTriple {
  BellLabel pair0;
  BellLabel pair1;
  BellLabel pair2;
};

struct RoundOutcome {
  bool z_coincide = false;
  bool x_coincide = false;
  // Label of pair0 after the round; meaningful when both checks coincide.
  BellLabel survivor;
};

// One round at the Pauli-frame level. A bilateral CNOT with control pair c
// and target pair t maps b_t <- b_t ^ b_c and a_c <- a_c ^ a_t; the round
// applies gate(0->1) then gate(2->1). The Z check reads the final flip bit
// of pair1, the X check the final phase bit of pair2. These update rules
// are validated branch-by-branch against the dense statevector model.
RoundOutcome propagate(const FrameTriple& frame);

// Exact coincidence probabilities as weighted sums over all 64 label
// triples, weight q_{s0} q_{s1} q_{s2}. Agrees with the closed-form
// polynomials to floating-point accuracy.
CoincidenceProbabilities enumerate_coincidence_probs(const BellDiagonalState& state);

class DegenerateMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DistillationResult {
  // Normalized survivor distribution conditioned on both checks passing.
  BellDiagonalState survivor_state;
  // Success weight of the round. Equals p_xz for Bell-diagonal inputs.
  double pi_xz = 1.0;
};

// Action of one successful round on the unmeasured pair, restricted to
// Bell-diagonal inputs. Requires a normalized (not necessarily physical)
// state; throws DegenerateMapError when no weight passes the checks.
DistillationResult distilled_map(const BellDiagonalState& state);

// The 64-row truth table (label triple, weight monomial, outcome) in the
// fixed enumeration order, as CSV. Debug/audit artifact.
std::string truth_table_csv();

}  // namespace belldist
