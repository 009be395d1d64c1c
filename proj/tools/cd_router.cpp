#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cdr/bench_suite.hpp"
#include "cdr/dissection.hpp"
#include "cdr/fixer.hpp"
#include "cdr/instance.hpp"
#include "cdr/lowerbound.hpp"
#include "cdr/oracle.hpp"
#include "cdr/schedule.hpp"
#include "cdr/simulator.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kExhausted = 2;
constexpr int kUsage = 64;

void setup_logging() {
  auto logger = spdlog::stderr_logger_mt("cd-router");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("CD_ROUTER_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::err);
  }
}

// 5.24e-4 rather than 5.24e-04.
std::string short_sci(double v) {
  auto s = fmt::format("{:.2e}", v);
  const auto e = s.find('e');
  if (e == std::string::npos) return s;
  std::string mantissa = s.substr(0, e);
  std::string exp = s.substr(e + 1);
  std::string sign;
  if (!exp.empty() && (exp[0] == '-' || exp[0] == '+')) {
    if (exp[0] == '-') sign = "-";
    exp = exp.substr(1);
  }
  while (exp.size() > 1 && exp[0] == '0') exp.erase(0, 1);
  return mantissa + "e" + sign + exp;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << body;
}

int analyze(const std::string& file, std::optional<std::int64_t> delta) {
  const auto inst = cdr::load_instance(file);
  const auto report = cdr::validate(inst);
  if (!report.ok()) {
    for (const auto& v : report.violations) std::cout << "invalid: " << v.message << "\n";
    return kFailed;
  }
  const auto s = cdr::stats(inst);
  std::cout << "C=" << s.congestion << " D=" << s.dilation << " ok\n";
  if (delta) {
    const auto padded = cdr::pad(inst);
    const auto ladder = padded.length < *delta ? cdr::LevelLadder::root_only(padded.length)
                                               : cdr::build_ladder(padded.length, *delta);
    std::cout << cdr::dump(ladder, cdr::dissect_plain(padded.length, ladder));
    std::cout << cdr::dump(ladder, cdr::dissect_shifted(padded.length, ladder));
  }
  return kOk;
}

struct ScheduleArgs {
  std::string instance;
  std::string variant = "plain";
  std::int64_t delta = 4;
  std::uint64_t seed = 1;
  std::string strategy = "resample";
  std::string finalize = "ones";
  std::string out;
  std::string report;
};

int schedule(const ScheduleArgs& a) {
  const auto inst = cdr::load_instance(a.instance);
  const auto invalid = cdr::validate(inst);
  if (!invalid.ok()) {
    for (const auto& v : invalid.violations) std::cerr << "invalid: " << v.message << "\n";
    return kFailed;
  }
  cdr::FixerConfig cfg;
  cfg.variant = cdr::parse_variant(a.variant);
  cfg.delta = a.delta;
  cfg.seed = a.seed;
  cfg.strategy = cdr::parse_strategy(a.strategy);
  cfg.finalize = cdr::parse_finalize(a.finalize);
  cfg.validate();
  try {
    const auto result = cdr::run_pipeline(inst, cfg);
    const auto json = cdr::to_json(result.schedule).dump(2) + "\n";
    if (a.out.empty()) {
      std::cout << json;
    } else {
      write_file(a.out, json);
    }
    if (!a.report.empty()) write_file(a.report, cdr::to_json(result.report).dump(2) + "\n");
    std::cerr << fmt::format("variant={} delta={} gamma={:.6f} load={} makespan={}\n", to_string(cfg.variant),
                             cfg.delta, result.report.gamma_final, result.report.load, result.schedule.makespan());
    return result.report.counting_bound_holds ? kOk : kFailed;
  } catch (const cdr::FixLevelFailure& e) {
    std::cerr << "fixer exhausted: " << e.what() << "\n";
    return kExhausted;
  }
}

struct SimulateArgs {
  std::string instance;
  std::string schedule;
  std::int64_t capacity = 1;
  std::string trace;
  std::string arrivals;
  std::string summary;
};

int simulate(const SimulateArgs& a) {
  const auto inst = cdr::load_instance(a.instance);
  const auto sched = cdr::load_schedule(a.schedule);
  const auto trace = cdr::simulate(inst, sched, a.capacity);
  const auto report = cdr::check(trace, {a.capacity});
  if (!a.trace.empty()) write_file(a.trace, cdr::loads_csv(trace));
  if (!a.arrivals.empty()) write_file(a.arrivals, cdr::arrivals_csv(trace));
  if (!a.summary.empty()) write_file(a.summary, cdr::summary_json(trace).dump(2) + "\n");
  std::cout << "load=" << trace.max_load << " makespan=" << trace.makespan << " " << (report.pass() ? "PASS" : "FAIL")
            << "\n"
            << report.text();
  return report.pass() ? kOk : kFailed;
}

int lb_gen(std::int64_t n, std::uint64_t seed, const std::string& out) {
  const auto json = cdr::to_json(cdr::generate(n, seed)).dump(2) + "\n";
  if (out.empty()) {
    std::cout << json;
  } else {
    write_file(out, json);
  }
  return kOk;
}

int lb_solve(const std::string& file, std::optional<std::int64_t> horizon) {
  const auto inst = cdr::load_instance(file);
  try {
    const auto best = cdr::oracle::optimal_makespan(inst, horizon);
    if (!best) {
      std::cout << "no schedule within horizon " << horizon.value_or(cdr::oracle::default_horizon(inst)) << "\n";
      return kFailed;
    }
    const auto s = cdr::stats(inst);
    std::cout << "optimal=" << *best << " C=" << s.congestion << " D=" << s.dilation << "\n";
    return kOk;
  } catch (const cdr::oracle::TooLarge& e) {
    std::cerr << e.what() << "\n";
    return kExhausted;
  }
}

int lb_margin(double eps) {
  const auto m = cdr::margin(eps);
  std::cout << "phi=" << short_sci(m.phi) << (m.separation ? " < " : " >= ") << short_sci(m.collision_exponent)
            << (m.separation ? " : separation holds" : " : separation fails") << "\n";
  return kOk;
}

struct BenchArgs {
  cdr::BenchOptions options;
  std::string out;
};

int bench(BenchArgs& a) {
  const auto rows = cdr::run_bench(a.options);
  if (a.out.empty()) {
    cdr::write_csv(std::cout, rows);
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + a.out);
    cdr::write_csv(f, rows);
  }
  for (const auto& r : rows) {
    if (!r.ok) return kFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Store-and-forward packet scheduling in O(C + D) steps"};
  app.require_subcommand(1);

  std::string analyze_file;
  std::optional<std::int64_t> analyze_delta;
  auto* c_analyze = app.add_subcommand("analyze", "print congestion, dilation and validation");
  c_analyze->add_option("instance", analyze_file)->required();
  c_analyze->add_option("--delta", analyze_delta, "also print the block dissection");

  ScheduleArgs sa;
  auto* c_schedule = app.add_subcommand("schedule", "run the scheduling pipeline");
  c_schedule->add_option("instance", sa.instance)->required();
  c_schedule->add_option("--variant", sa.variant)->check(CLI::IsMember({"plain", "buffered"}));
  c_schedule->add_option("--delta", sa.delta)->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 20));
  c_schedule->add_option("--seed", sa.seed);
  c_schedule->add_option("--strategy", sa.strategy)->check(CLI::IsMember({"resample", "greedy"}));
  c_schedule->add_option("--finalize", sa.finalize)->check(CLI::IsMember({"ones", "greedy"}));
  c_schedule->add_option("--out", sa.out, "schedule JSON (stdout if omitted)");
  c_schedule->add_option("--report", sa.report, "per-level fixer report JSON");

  SimulateArgs sim;
  auto* c_simulate = app.add_subcommand("simulate", "execute a schedule and check it");
  c_simulate->add_option("instance", sim.instance)->required();
  c_simulate->add_option("schedule", sim.schedule)->required();
  c_simulate->add_option("--capacity", sim.capacity)->check(CLI::PositiveNumber);
  c_simulate->add_option("--trace", sim.trace, "per-(edge, slot) load CSV");
  c_simulate->add_option("--arrivals", sim.arrivals, "per-packet arrival CSV");
  c_simulate->add_option("--summary", sim.summary, "summary JSON");

  auto* c_lb = app.add_subcommand("lowerbound", "random-permutation lower-bound experiments");
  c_lb->require_subcommand(1);
  std::int64_t lb_n = 2;
  std::uint64_t lb_seed = 1;
  std::string lb_out;
  auto* c_gen = c_lb->add_subcommand("gen", "generate an instance");
  c_gen->add_option("--n", lb_n)->required()->check(CLI::Range(std::int64_t{1}, std::int64_t{4096}));
  c_gen->add_option("--seed", lb_seed);
  c_gen->add_option("--out", lb_out);
  std::string solve_file;
  std::optional<std::int64_t> solve_horizon;
  auto* c_solve = c_lb->add_subcommand("solve", "exact optimal makespan");
  c_solve->add_option("instance", solve_file)->required();
  c_solve->add_option("--horizon", solve_horizon);
  double eps = 0.0;
  auto* c_margin = c_lb->add_subcommand("margin", "compare phi(eps) with the collision exponent");
  c_margin->add_option("--eps", eps)->required()->check(CLI::NonNegativeNumber);

  BenchArgs ba;
  std::string bench_variant = "both";
  auto* c_bench = app.add_subcommand("bench", "benchmark the pipeline, CSV output");
  c_bench->add_option("--suite", ba.options.suite)->check(CLI::IsMember({"random", "shared"}));
  c_bench->add_option("--count", ba.options.count)->check(CLI::PositiveNumber);
  c_bench->add_option("--seed", ba.options.seed);
  c_bench->add_option("--delta", ba.options.deltas);
  c_bench->add_option("--variant", bench_variant)->check(CLI::IsMember({"plain", "buffered", "both"}));
  c_bench->add_option("--jobs", ba.options.jobs)->check(CLI::PositiveNumber);
  c_bench->add_flag("--deterministic", ba.options.deterministic, "zero the timing column");
  c_bench->add_option("--out", ba.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*c_analyze) return analyze(analyze_file, analyze_delta);
    if (*c_schedule) return schedule(sa);
    if (*c_simulate) return simulate(sim);
    if (*c_gen) return lb_gen(lb_n, lb_seed, lb_out);
    if (*c_solve) return lb_solve(solve_file, solve_horizon);
    if (*c_margin) return lb_margin(eps);
    if (*c_bench) {
      if (bench_variant != "both") ba.options.variants = {cdr::parse_variant(bench_variant)};
      return bench(ba);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
