#include "belldist/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace belldist {

namespace {

// Linear-interpolation quantile on sorted data.
double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  if (sorted.size() == 1) return sorted.front();
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<double> freedman_diaconis_edges(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("histogram of empty data");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  const double width =
      2.0 * iqr * std::pow(static_cast<double>(sorted.size()), -1.0 / 3.0);
  if (!(width > 0.0) || !(hi > lo)) {
    return {lo, hi};
  }
  const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  std::vector<double> edges;
  edges.reserve(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges.push_back(lo + static_cast<double>(i) * width);
  }
  return edges;
}

std::vector<std::uint64_t> bin_counts(const std::vector<double>& values,
                                      const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("need at least two bin edges");
  const std::size_t bins = edges.size() - 1;
  std::vector<std::uint64_t> counts(bins, 0);
  const double lo = edges.front();
  const double width = (edges.back() - lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t k;
    if (width > 0.0) {
      const double offset = (v - lo) / width;
      k = offset < 0.0 ? 0 : static_cast<std::size_t>(offset);
      if (k >= bins) k = bins - 1;
    } else {
      k = 0;
    }
    ++counts[k];
  }
  return counts;
}

HistogramResult run_histogram(const HistogramConfig& config) {
  if (config.trials < 2) throw std::invalid_argument("histogram requires at least 2 trials");
  validate_physical(config.q);

  HistogramResult result;
  result.distances.assign(config.trials, 0.0);
  result.ok.assign(config.trials, false);

  auto run_trial = [&](int t) {
    const std::uint64_t trial_seed = derive_substream(config.master_seed, t);
    const RunSummary summary = run(config.q, config.n, trial_seed);
    const EstimateResult outcome =
        estimate(summary, config.eps_z, config.eps_x, config.eps_xz);
    if (const auto* report = std::get_if<EstimateReport>(&outcome)) {
      result.distances[t] = trace_distance(report->q_hat, config.q);
      result.ok[t] = true;
    }
  };

  const int workers = std::max(1, std::min(config.workers, config.trials));
  if (workers == 1) {
    for (int t = 0; t < config.trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (int t = w; t < config.trials; t += workers) run_trial(t);
      });
    }
    for (auto& th : threads) th.join();
  }

  std::vector<double> good;
  good.reserve(config.trials);
  for (int t = 0; t < config.trials; ++t) {
    if (result.ok[t]) {
      good.push_back(result.distances[t]);
    } else {
      ++result.failures;
    }
  }
  if (good.empty()) {
    return result;  // all trials failed; stats stay zero, failures tells the story
  }

  double sum = 0.0;
  for (double d : good) sum += d;
  result.mean = sum / static_cast<double>(good.size());
  if (good.size() > 1) {
    double ss = 0.0;
    for (double d : good) ss += (d - result.mean) * (d - result.mean);
    result.std_dev = std::sqrt(ss / static_cast<double>(good.size() - 1));
  }
  result.bin_edges = freedman_diaconis_edges(good);
  result.counts = bin_counts(good, result.bin_edges);
  return result;
}

}  // namespace belldist
