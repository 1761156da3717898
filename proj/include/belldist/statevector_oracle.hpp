#pragma once

#include <array>

#include "belldist/exact_oracle.hpp"

namespace belldist {

// Outcome statistics of one pure Bell-triple branch, computed by dense
// 6-qubit statevector simulation of the round: build the product state,
// apply the bilateral CNOTs as unitaries, then evaluate the measurement
// projectors. For a pure branch the coincidence probabilities are 0 or 1
// and the post-selected pair0 state is a single Bell state, so this is a
// bitwise check of the frame update rules.
struct BranchStatistics {
  double p_z = 0.0;
  double p_x = 0.0;
  double p_xz = 0.0;
  // Unnormalized Bell-basis weights of pair0 after both checks pass;
  // they sum to p_xz.
  std::array<double, 4> survivor_weights{0.0, 0.0, 0.0, 0.0};
};

BranchStatistics statevector_branch(const FrameTriple& frame);

// Mixture-weighted coincidence probabilities from the statevector model.
// Must equal enumerate_coincidence_probs to floating-point accuracy.
CoincidenceProbabilities statevector_probs(const BellDiagonalState& state);

}  // namespace belldist
