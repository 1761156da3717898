#include "belldist/statevector_oracle.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace belldist {

namespace {

// Qubit layout, little-endian within a 6-bit basis index:
// bit 0 = Alice half of pair0, bit 1 = Bob half of pair0,
// bits 2,3 = pair1, bits 4,5 = pair2.
constexpr int kDim = 64;

using Amp = std::complex<double>;
using State = std::array<Amp, kDim>;

// Two-qubit amplitudes of the Bell state with phase bit a and flip bit b,
// index = alice_bit + 2 * bob_bit.
std::array<double, 4> bell_pair_amplitudes(const BellLabel& label) {
  const double s = 1.0 / std::sqrt(2.0);
  std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};
  if (label.flip_bit == 0) {
    v[0b00] = s;
    v[0b11] = (label.phase_bit ? -s : s);
  } else {
    v[0b01] = s;
    v[0b10] = (label.phase_bit ? -s : s);
  }
  return v;
}

State build_branch(const FrameTriple& frame) {
  const auto v0 = bell_pair_amplitudes(frame.pair0);
  const auto v1 = bell_pair_amplitudes(frame.pair1);
  const auto v2 = bell_pair_amplitudes(frame.pair2);
  State psi;
  for (int n = 0; n < kDim; ++n) {
    const int p0 = ((n >> 0) & 1) + 2 * ((n >> 1) & 1);
    const int p1 = ((n >> 2) & 1) + 2 * ((n >> 3) & 1);
    const int p2 = ((n >> 4) & 1) + 2 * ((n >> 5) & 1);
    psi[n] = v0[p0] * v1[p1] * v2[p2];
  }
  return psi;
}

void apply_cnot(State& psi, int control, int target) {
  for (int n = 0; n < kDim; ++n) {
    if (((n >> control) & 1) && !((n >> target) & 1)) {
      std::swap(psi[n], psi[n | (1 << target)]);
    }
  }
}

void apply_hadamard(State& psi, int qubit) {
  const double s = 1.0 / std::sqrt(2.0);
  for (int n = 0; n < kDim; ++n) {
    if (!((n >> qubit) & 1)) {
      const Amp lo = psi[n];
      const Amp hi = psi[n | (1 << qubit)];
      psi[n] = s * (lo + hi);
      psi[n | (1 << qubit)] = s * (lo - hi);
    }
  }
}

}  // namespace

BranchStatistics statevector_branch(const FrameTriple& frame) {
  State psi = build_branch(frame);
  // Bilateral CNOT pair0 -> pair1, then pair2 -> pair1.
  apply_cnot(psi, 0, 2);
  apply_cnot(psi, 1, 3);
  apply_cnot(psi, 4, 2);
  apply_cnot(psi, 5, 3);
  // Rotate pair2 into the X basis so all checks read computational bits.
  apply_hadamard(psi, 4);
  apply_hadamard(psi, 5);

  const auto bell0 = bell_pair_amplitudes(BellLabel::from_index(0));
  const auto bell1 = bell_pair_amplitudes(BellLabel::from_index(1));
  const auto bell2 = bell_pair_amplitudes(BellLabel::from_index(2));
  const auto bell3 = bell_pair_amplitudes(BellLabel::from_index(3));
  const std::array<const std::array<double, 4>*, 4> bells{&bell0, &bell1, &bell2, &bell3};

  BranchStatistics stats;
  // Sum over the 16 measurement outcomes of pairs 1 and 2; for each passing
  // outcome, project the residual pair0 vector onto the Bell basis.
  for (int rest = 0; rest < 16; ++rest) {
    const int z_a = (rest >> 0) & 1, z_b = (rest >> 1) & 1;
    const int x_a = (rest >> 2) & 1, x_b = (rest >> 3) & 1;
    const bool zc = (z_a == z_b);
    const bool xc = (x_a == x_b);
    std::array<Amp, 4> pair0{};
    double norm = 0.0;
    for (int p0 = 0; p0 < 4; ++p0) {
      const int n = (p0 & 1) | ((p0 >> 1) << 1) | (z_a << 2) | (z_b << 3) | (x_a << 4) | (x_b << 5);
      pair0[p0] = psi[n];
      norm += std::norm(psi[n]);
    }
    if (zc) stats.p_z += norm;
    if (xc) stats.p_x += norm;
    if (zc && xc) {
      stats.p_xz += norm;
      for (int k = 0; k < 4; ++k) {
        Amp overlap = 0.0;
        for (int p0 = 0; p0 < 4; ++p0) overlap += (*bells[k])[p0] * pair0[p0];
        stats.survivor_weights[k] += std::norm(overlap);
      }
    }
  }
  return stats;
}

CoincidenceProbabilities statevector_probs(const BellDiagonalState& state) {
  validate_normalized(state);
  const std::array<double, 4> q = state.coeffs();
  CoincidenceProbabilities p{0.0, 0.0, 0.0};
  for (int s0 = 0; s0 < 4; ++s0) {
    for (int s1 = 0; s1 < 4; ++s1) {
      for (int s2 = 0; s2 < 4; ++s2) {
        const double w = q[s0] * q[s1] * q[s2];
        const BranchStatistics stats = statevector_branch(FrameTriple{
            BellLabel::from_index(s0), BellLabel::from_index(s1), BellLabel::from_index(s2)});
        p.p_z += w * stats.p_z;
        p.p_x += w * stats.p_x;
        p.p_xz += w * stats.p_xz;
      }
    }
  }
  return p;
}

}  // namespace belldist
