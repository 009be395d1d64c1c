#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cdr/delay_model.hpp"

namespace cdr {

struct BenchRow {
  std::string instance;
  std::uint64_t seed = 0;
  Variant variant = Variant::kPlain;
  std::int64_t delta = 0;
  double relax = 1.0;
  double gamma = 1.0;
  std::int64_t load = 0;       // before stretching
  std::int64_t makespan = 0;   // final, load-1 schedule
  std::int64_t congestion = 0;
  std::int64_t dilation = 0;
  double ratio = 0.0;          // makespan / (C + D)
  double ms = 0.0;
  bool ok = true;              // pipeline finished and simulation passed
};

struct BenchOptions {
  std::string suite = "random";
  std::int64_t count = 10;
  std::uint64_t seed = 1;
  std::vector<std::int64_t> deltas{4};
  std::vector<Variant> variants{Variant::kPlain, Variant::kBuffered};
  int jobs = 1;
  bool deterministic = false;  // zero the timing column
};

/// Runs the pipeline on `count` generated instances per (variant, delta) and
/// simulates every result. Rows come back in a fixed order whatever `jobs` is.
std::vector<BenchRow> run_bench(const BenchOptions& options);

extern const char* const kBenchHeader;
void write_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace cdr
