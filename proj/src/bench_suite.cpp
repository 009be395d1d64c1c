#include "cdr/bench_suite.hpp"

#include <chrono>
#include <stdexcept>

#include <fmt/format.h>
#include <omp.h>

#include "cdr/fixer.hpp"
#include "cdr/instance.hpp"
#include "cdr/simulator.hpp"

namespace cdr {

const char* const kBenchHeader = "instance,seed,variant,delta,relax,gamma,load,makespan,C,D,ratio,ms";

namespace {

struct Job {
  std::string name;
  std::uint64_t seed;
  Instance instance;
  Variant variant;
  std::int64_t delta;
};

std::vector<Job> make_jobs(const BenchOptions& o) {
  if (o.count < 1) throw std::invalid_argument("bench count must be positive");
  std::vector<Job> jobs;
  for (std::int64_t k = 0; k < o.count; ++k) {
    const auto seed = o.seed + static_cast<std::uint64_t>(k);
    Instance inst;
    std::string name;
    if (o.suite == "random") {
      RandomInstanceParams p;
      p.packets = 4 + (k * 7) % 29;
      p.max_length = std::int64_t{8} << (k % 5);
      inst = random_instance(seed, p);
      name = fmt::format("random-{}", k);
    } else if (o.suite == "shared") {
      const auto c = 2 + k % 7;
      inst = shared_path_instance(c, 4 + (k * 3) % 29);
      name = fmt::format("shared-{}", k);
    } else {
      throw std::invalid_argument("unknown bench suite: " + o.suite);
    }
    for (auto v : o.variants) {
      for (auto d : o.deltas) jobs.push_back({name, seed, inst, v, d});
    }
  }
  return jobs;
}

BenchRow run_one(const Job& job, bool deterministic) {
  BenchRow row;
  row.instance = job.name;
  row.seed = job.seed;
  row.variant = job.variant;
  row.delta = job.delta;
  const auto s = stats(job.instance);
  row.congestion = s.congestion;
  row.dilation = s.dilation;

  FixerConfig cfg;
  cfg.variant = job.variant;
  cfg.delta = job.delta;
  cfg.seed = job.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto result = run_pipeline(job.instance, cfg);
    row.relax = result.report.max_relax;
    row.gamma = result.report.gamma_final;
    row.load = result.report.load;
    row.makespan = result.schedule.makespan();
    row.ok = check(simulate(job.instance, result.schedule, 1), {1}).pass();
  } catch (const std::exception&) {
    row.ok = false;
  }
  const auto stop = std::chrono::steady_clock::now();
  row.ms = deterministic ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
  row.ratio = static_cast<double>(row.makespan) / static_cast<double>(row.congestion + row.dilation);
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  const auto jobs = make_jobs(options);
  std::vector<BenchRow> rows(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(options.jobs > 0 ? options.jobs : 1)
  for (std::int64_t k = 0; k < n; ++k) rows[k] = run_one(jobs[k], options.deterministic);
  return rows;
}

void write_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchHeader << "\n";
  for (const auto& r : rows) {
    os << fmt::format("{},{},{},{},{:g},{:.6f},{},{},{},{},{:.4f},{:.3f}\n", r.instance, r.seed,
                      to_string(r.variant), r.delta, r.relax, r.gamma, r.load, r.makespan, r.congestion,
                      r.dilation, r.ratio, r.ms);
  }
}

}  // namespace cdr
