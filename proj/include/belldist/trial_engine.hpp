#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "belldist/analytic_model.hpp"
#include "belldist/bell_state.hpp"

namespace belldist {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

// Independent sub-stream seed for (seed, k); used to give every trial of a
// multi-trial experiment its own master seed.
std::uint64_t derive_substream(std::uint64_t seed, std::uint64_t k);

// Counter-based uniform stream: output k is mix64(seed + golden * k), i.e.
// the SplitMix64 sequence addressed by counter. Streams for disjoint counter
// ranges are independent of evaluation order, which is what makes parallel
// runs reproducible at any worker count.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t counter = 0)
      : seed_(seed), counter_(counter) {}

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

// Coincidence flags of one consumed triplet of pairs.
struct TripletRecord {
  bool z_coincide = false;
  bool x_coincide = false;
};

// Aggregated statistics of n triplets. All three empirical probabilities
// derive from the same record set.
struct RunSummary {
  std::uint64_t n = 0;
  std::uint64_t count_z = 0;
  std::uint64_t count_x = 0;
  std::uint64_t count_xz = 0;
  std::uint64_t master_seed = 0;

  CoincidenceProbabilities empirical() const;
};

// Draws three labels from q by inverse CDF over the fixed label order and
// propagates them through the round. Requires a physical state.
TripletRecord sample_record(const BellDiagonalState& state, RandomStream& stream);

// n records aggregated. Record i draws from counters 3i..3i+2 of the master
// stream, so the result is a pure function of (state, n, master_seed)
// regardless of worker count. Rejects n = 0.
RunSummary run(const BellDiagonalState& state, std::uint64_t n, std::uint64_t master_seed,
               int workers = 1);

// Materialized variant for export.
std::vector<TripletRecord> generate_records(const BellDiagonalState& state, std::uint64_t n,
                                            std::uint64_t master_seed, int workers = 1);

RunSummary summarize(std::span<const TripletRecord> records, std::uint64_t master_seed);

class RecordIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kRecordSchemaVersion = 1;

// JSON side file accompanying a record CSV.
struct RecordFileMeta {
  std::uint64_t n = 0;
  std::uint64_t master_seed = 0;
  std::optional<BellDiagonalState> q;  // present when the records were simulated
  int schema_version = kRecordSchemaVersion;
};

// Record file format: CSV with header "index,z_coincide,x_coincide" and 0/1
// values, plus metadata at <csv_path>.meta.json.
void export_records(const std::string& csv_path, std::span<const TripletRecord> records,
                    const RecordFileMeta& meta);

struct ImportedRecords {
  std::vector<TripletRecord> records;
  RecordFileMeta meta;
};

// Throws RecordIoError on missing files, malformed rows, truncation against
// the metadata count, or an unsupported schema version.
ImportedRecords import_records(const std::string& csv_path);

}  // namespace belldist
