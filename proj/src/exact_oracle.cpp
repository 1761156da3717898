#include "belldist/exact_oracle.hpp"

#include <array>
#include <sstream>

namespace belldist {

RoundOutcome propagate(const FrameTriple& frame) {
  std::uint8_t a0 = frame.pair0.phase_bit, b0 = frame.pair0.flip_bit;
  std::uint8_t a1 = frame.pair1.phase_bit, b1 = frame.pair1.flip_bit;
  std::uint8_t a2 = frame.pair2.phase_bit, b2 = frame.pair2.flip_bit;

  // gate(0->1)
  b1 ^= b0;
  a0 ^= a1;
  // gate(2->1)
  b1 ^= b2;
  a2 ^= a1;

  RoundOutcome out;
  out.z_coincide = (b1 == 0);
  out.x_coincide = (a2 == 0);
  out.survivor = BellLabel{a0, b0};
  return out;
}

CoincidenceProbabilities enumerate_coincidence_probs(const BellDiagonalState& state) {
  validate_normalized(state);
  const std::array<double, 4> q = state.coeffs();
  double pz = 0.0, px = 0.0, pxz = 0.0;
  for (int s0 = 0; s0 < 4; ++s0) {
    for (int s1 = 0; s1 < 4; ++s1) {
      for (int s2 = 0; s2 < 4; ++s2) {
        const double w = q[s0] * q[s1] * q[s2];
        const RoundOutcome out = propagate(FrameTriple{
            BellLabel::from_index(s0), BellLabel::from_index(s1), BellLabel::from_index(s2)});
        if (out.z_coincide) pz += w;
        if (out.x_coincide) px += w;
        if (out.z_coincide && out.x_coincide) pxz += w;
      }
    }
  }
  return CoincidenceProbabilities{pz, px, pxz};
}

DistillationResult distilled_map(const BellDiagonalState& state) {
  validate_normalized(state);
  const std::array<double, 4> q = state.coeffs();
  std::array<double, 4> survivor{0.0, 0.0, 0.0, 0.0};
  double pi = 0.0;
  for (int s0 = 0; s0 < 4; ++s0) {
    for (int s1 = 0; s1 < 4; ++s1) {
      for (int s2 = 0; s2 < 4; ++s2) {
        const double w = q[s0] * q[s1] * q[s2];
        const RoundOutcome out = propagate(FrameTriple{
            BellLabel::from_index(s0), BellLabel::from_index(s1), BellLabel::from_index(s2)});
        if (out.z_coincide && out.x_coincide) {
          pi += w;
          survivor[out.survivor.index()] += w;
        }
      }
    }
  }
  if (!(pi > 0.0)) {
    std::ostringstream msg;
    msg << "distillation success weight " << pi << " is not positive";
    throw DegenerateMapError(msg.str());
  }
  return DistillationResult{
      BellDiagonalState{survivor[0] / pi, survivor[1] / pi, survivor[2] / pi, survivor[3] / pi},
      pi};
}

std::string truth_table_csv() {
  std::ostringstream out;
  out << "pair0,pair1,pair2,weight,z_coincide,x_coincide,survivor\n";
  static constexpr const char* kMonomial[4] = {"q1", "q2", "q3", "q4"};
  for (int s0 = 0; s0 < 4; ++s0) {
    for (int s1 = 0; s1 < 4; ++s1) {
      for (int s2 = 0; s2 < 4; ++s2) {
        const FrameTriple frame{BellLabel::from_index(s0), BellLabel::from_index(s1),
                                BellLabel::from_index(s2)};
        const RoundOutcome o = propagate(frame);
        out << frame.pair0.name() << ',' << frame.pair1.name() << ',' << frame.pair2.name()
            << ',' << kMonomial[s0] << '*' << kMonomial[s1] << '*' << kMonomial[s2] << ','
            << (o.z_coincide ? 1 : 0) << ',' << (o.x_coincide ? 1 : 0) << ','
            << (o.z_coincide && o.x_coincide ? o.survivor.name() : "-") << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace belldist
