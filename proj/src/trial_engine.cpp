#include "belldist/trial_engine.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "belldist/exact_oracle.hpp"

namespace belldist {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

BellLabel draw_label(const std::array<double, 4>& cumulative, double u) {
  if (u < cumulative[0]) return BellLabel::from_index(0);
  if (u < cumulative[1]) return BellLabel::from_index(1);
  if (u < cumulative[2]) return BellLabel::from_index(2);
  return BellLabel::from_index(3);
}

std::array<double, 4> cumulative_of(const BellDiagonalState& state) {
  return {state.q1, state.q1 + state.q2, state.q1 + state.q2 + state.q3, 1.0};
}

TripletRecord sample_with_cumulative(const std::array<double, 4>& cumulative,
                                     RandomStream& stream) {
  const BellLabel l0 = draw_label(cumulative, stream.next_unit());
  const BellLabel l1 = draw_label(cumulative, stream.next_unit());
  const BellLabel l2 = draw_label(cumulative, stream.next_unit());
  const RoundOutcome out = propagate(FrameTriple{l0, l1, l2});
  return TripletRecord{out.z_coincide, out.x_coincide};
}

int clamp_workers(int workers, std::uint64_t n) {
  if (workers < 1) workers = 1;
  if (static_cast<std::uint64_t>(workers) > n) workers = static_cast<int>(n);
  return workers;
}

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_substream(std::uint64_t seed, std::uint64_t k) {
  return mix64(seed ^ mix64(k + 0x632BE59BD9B4E019ull));
}

std::uint64_t RandomStream::next_u64() { return mix64(seed_ + kGolden * ++counter_); }

double RandomStream::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

CoincidenceProbabilities RunSummary::empirical() const {
  const double dn = static_cast<double>(n);
  return CoincidenceProbabilities{count_z / dn, count_x / dn, count_xz / dn};
}

TripletRecord sample_record(const BellDiagonalState& state, RandomStream& stream) {
  validate_physical(state);
  return sample_with_cumulative(cumulative_of(state), stream);
}

RunSummary run(const BellDiagonalState& state, std::uint64_t n, std::uint64_t master_seed,
               int workers) {
  validate_physical(state);
  if (n == 0) throw std::invalid_argument("run requires n >= 1");
  const auto cumulative = cumulative_of(state);
  workers = clamp_workers(workers, n);

  struct Partial {
    std::uint64_t z = 0, x = 0, xz = 0;
  };
  std::vector<Partial> partials(workers);
  auto work = [&](int w, std::uint64_t lo, std::uint64_t hi) {
    Partial acc;
    for (std::uint64_t i = lo; i < hi; ++i) {
      RandomStream stream(master_seed, 3 * i);
      const TripletRecord rec = sample_with_cumulative(cumulative, stream);
      acc.z += rec.z_coincide;
      acc.x += rec.x_coincide;
      acc.xz += (rec.z_coincide && rec.x_coincide);
    }
    partials[w] = acc;
  };

  if (workers == 1) {
    work(0, 0, n);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::uint64_t chunk = n / workers;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t lo = chunk * w;
      const std::uint64_t hi = (w + 1 == workers) ? n : chunk * (w + 1);
      threads.emplace_back(work, w, lo, hi);
    }
    for (auto& t : threads) t.join();
  }

  RunSummary summary;
  summary.n = n;
  summary.master_seed = master_seed;
  for (const Partial& p : partials) {
    summary.count_z += p.z;
    summary.count_x += p.x;
    summary.count_xz += p.xz;
  }
  return summary;
}

std::vector<TripletRecord> generate_records(const BellDiagonalState& state, std::uint64_t n,
                                            std::uint64_t master_seed, int workers) {
  validate_physical(state);
  if (n == 0) throw std::invalid_argument("generate_records requires n >= 1");
  const auto cumulative = cumulative_of(state);
  workers = clamp_workers(workers, n);

  std::vector<TripletRecord> records(n);
  auto work = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      RandomStream stream(master_seed, 3 * i);
      records[i] = sample_with_cumulative(cumulative, stream);
    }
  };
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::uint64_t chunk = n / workers;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t lo = chunk * w;
      const std::uint64_t hi = (w + 1 == workers) ? n : chunk * (w + 1);
      threads.emplace_back(work, lo, hi);
    }
    for (auto& t : threads) t.join();
  }
  return records;
}

RunSummary summarize(std::span<const TripletRecord> records, std::uint64_t master_seed) {
  if (records.empty()) throw std::invalid_argument("summarize requires at least one record");
  RunSummary summary;
  summary.n = records.size();
  summary.master_seed = master_seed;
  for (const TripletRecord& rec : records) {
    summary.count_z += rec.z_coincide;
    summary.count_x += rec.x_coincide;
    summary.count_xz += (rec.z_coincide && rec.x_coincide);
  }
  return summary;
}

void export_records(const std::string& csv_path, std::span<const TripletRecord> records,
                    const RecordFileMeta& meta) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw RecordIoError("cannot open " + csv_path + " for writing");
    out << "index,z_coincide,x_coincide\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      out << i << ',' << (records[i].z_coincide ? 1 : 0) << ','
          << (records[i].x_coincide ? 1 : 0) << '\n';
    }
    if (!out) throw RecordIoError("write failed for " + csv_path);
  }
  nlohmann::ordered_json j;
  j["schema_version"] = meta.schema_version;
  j["n"] = meta.n;
  j["master_seed"] = meta.master_seed;
  if (meta.q) {
    j["q"] = {meta.q->q1, meta.q->q2, meta.q->q3, meta.q->q4};
  }
  std::ofstream out(csv_path + ".meta.json", std::ios::binary);
  if (!out) throw RecordIoError("cannot open " + csv_path + ".meta.json for writing");
  out << j.dump(2) << '\n';
  if (!out) throw RecordIoError("write failed for " + csv_path + ".meta.json");
}

ImportedRecords import_records(const std::string& csv_path) {
  RecordFileMeta meta;
  {
    std::ifstream in(csv_path + ".meta.json", std::ios::binary);
    if (!in) throw RecordIoError("missing metadata file " + csv_path + ".meta.json");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw RecordIoError(std::string("malformed record metadata: ") + e.what());
    }
    try {
      meta.schema_version = j.at("schema_version").get<int>();
      if (meta.schema_version != kRecordSchemaVersion) {
        throw RecordIoError("unsupported record schema version " +
                            std::to_string(meta.schema_version));
      }
      meta.n = j.at("n").get<std::uint64_t>();
      meta.master_seed = j.at("master_seed").get<std::uint64_t>();
      if (j.contains("q")) {
        const auto q = j.at("q");
        if (!q.is_array() || q.size() != 4) {
          throw RecordIoError("record metadata field q must be an array of 4 numbers");
        }
        meta.q = BellDiagonalState{q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                                   q[3].get<double>()};
      }
    } catch (const nlohmann::json::exception& e) {
      throw RecordIoError(std::string("record metadata schema error: ") + e.what());
    }
  }

  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw RecordIoError("missing record file " + csv_path);
  std::string line;
  if (!std::getline(in, line) || line != "index,z_coincide,x_coincide") {
    throw RecordIoError("record file " + csv_path +
                        " has a bad header (expected index,z_coincide,x_coincide)");
  }
  std::vector<TripletRecord> records;
  records.reserve(meta.n);
  std::uint64_t expected_index = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    std::uint64_t index = 0;
    int z = -1, x = -1;
    char c1 = 0, c2 = 0;
    std::istringstream row(line);
    if (!(row >> index >> c1 >> z >> c2 >> x) || c1 != ',' || c2 != ',' ||
        (z != 0 && z != 1) || (x != 0 && x != 1)) {
      throw RecordIoError("malformed record row: \"" + line + "\"");
    }
    std::string trailing;
    if (row >> trailing) throw RecordIoError("trailing data in record row: \"" + line + "\"");
    if (index != expected_index) {
      throw RecordIoError("record index " + std::to_string(index) + " out of sequence (expected " +
                          std::to_string(expected_index) + ")");
    }
    ++expected_index;
    records.push_back(TripletRecord{z == 1, x == 1});
  }
  if (records.size() != meta.n) {
    throw RecordIoError("record file " + csv_path + " holds " + std::to_string(records.size()) +
                        " records but metadata declares " + std::to_string(meta.n));
  }
  return ImportedRecords{std::move(records), meta};
}

}  // namespace belldist
