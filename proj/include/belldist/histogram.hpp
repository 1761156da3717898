#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "belldist/estimator.hpp"

namespace belldist {

// Freedman-Diaconis bin edges: width 2*IQR*T^(-1/3), quartiles by linear
// interpolation. A degenerate spread (IQR = 0 or max = min) yields the
// single bin [min, max].
std::vector<double> freedman_diaconis_edges(const std::vector<double>& values);

// Bin counts against edges produced above; the last bin is closed on the
// right so the maximum lands inside.
std::vector<std::uint64_t> bin_counts(const std::vector<double>& values,
                                      const std::vector<double>& edges);

struct HistogramConfig {
  BellDiagonalState q;
  std::uint64_t n = 10000;  // triplets per trial
  int trials = 1000;
  std::uint64_t master_seed = 1;
  double eps_z = 0.01;
  double eps_x = 0.01;
  double eps_xz = 0.01;
  int workers = 1;
};

struct HistogramResult {
  // One entry per trial, in trial order. ok[t] == false marks a trial whose
  // estimation failed; its distance slot is meaningless and excluded from
  // every statistic below.
  std::vector<double> distances;
  std::vector<bool> ok;
  int failures = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
};

// T independent trials of (simulate n triplets -> estimate), collecting the
// trace distance between estimate and truth. Trial t runs on the sub-stream
// derive_substream(master_seed, t), so the result is identical for any
// worker count.
HistogramResult run_histogram(const HistogramConfig& config);

}  // namespace belldist
