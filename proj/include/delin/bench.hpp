#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "delin/instance_gen.hpp"
#include "delin/mip_model.hpp"
#include "delin/solver.hpp"

namespace delin {

struct BenchConfig {
  std::vector<int> ladder{kCompareLadder.begin(), kCompareLadder.end()};
  int trials = 5;          // timed runs per size and formulation
  int legacy_trials = -1;  // -1: same as trials
  bool warmup = true;      // one discarded run before timing
  double cap = 300.0;      // seconds per solve; beyond it the size is censored
  std::uint64_t seed = 1;
  Mode mode = Mode::tree;
  int workers = 1;
  bool compact_only = false;
};

struct BenchRow {
  int edges = 0;
  int vertices = 0;
  std::optional<double> legacy_s;
  std::optional<double> compact_s;
  bool legacy_censored = false;
  bool compact_censored = false;
  std::optional<double> compact_cost, legacy_cost;

  std::optional<double> speedup() const {
    if (!legacy_s || !compact_s || *compact_s <= 0.0) return std::nullopt;
    return *legacy_s / *compact_s;
  }
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace detail {

struct Timed {
  std::optional<double> seconds;  // nullopt when the cap was hit
  double cost = 0.0;
};

inline Timed time_solve(const Graph& g, Mode mode, Formulation f, double cap, int workers) {
  const auto t0 = Clock::now();
  const auto m = build_model(g, mode, f);
  SolveOptions o;
  o.time_limit = std::max(0.0, cap - seconds_since(t0));
  o.parallel_workers = workers;
  const auto r = solve(m, o);
  const double s = seconds_since(t0);
  if (r.reconstruction.status != SolveStatus::optimal || s > cap) return {std::nullopt, r.reconstruction.cost};
  return {s, r.reconstruction.cost};
}

/// Median over `trials` runs; stops at the first censored run.
inline Timed timed_median(const Graph& g, Mode mode, Formulation f, int trials, bool warmup, double cap,
                          int workers) {
  if (warmup) {
    const auto w = time_solve(g, mode, f, cap, workers);
    if (!w.seconds) return w;
  }
  std::vector<double> runs;
  double c = 0.0;
  for (int i = 0; i < trials; ++i) {
    const auto t = time_solve(g, mode, f, cap, workers);
    if (!t.seconds) return t;
    runs.push_back(*t.seconds);
    c = t.cost;
  }
  return {median(runs), c};
}

}  // namespace detail

/// Per-size median solve times of both formulations on random weight graphs.
/// Once a formulation exceeds the cap, larger sizes are censored without running.
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg,
                                       const std::function<void(const BenchRow&)>& progress = {}) {
  if (cfg.ladder.empty()) fail(ErrorCode::invalid_argument, "bench ladder is empty");
  if (cfg.trials < 1) fail(ErrorCode::invalid_argument, "trials must be >= 1");
  const int legacy_trials = cfg.legacy_trials > 0 ? cfg.legacy_trials : cfg.trials;
  std::vector<BenchRow> rows;
  bool legacy_dead = cfg.compact_only, compact_dead = false;
  for (int edges : cfg.ladder) {
    BenchRow row;
    row.edges = edges;
    row.vertices = ladder_vertices(edges);
    const auto g = random_weight_graph(row.vertices, edges, Rng::derive(cfg.seed, static_cast<std::uint64_t>(edges)));
    if (!compact_dead) {
      const auto t = detail::timed_median(g, cfg.mode, Formulation::compact, cfg.trials, cfg.warmup, cfg.cap,
                                          cfg.workers);
      row.compact_s = t.seconds;
      if (t.seconds) row.compact_cost = t.cost;
    }
    if (!legacy_dead) {
      const auto t = detail::timed_median(g, cfg.mode, Formulation::legacy, legacy_trials, cfg.warmup, cfg.cap,
                                          cfg.workers);
      row.legacy_s = t.seconds;
      if (t.seconds) row.legacy_cost = t.cost;
    }
    row.compact_censored = !row.compact_s;
    row.legacy_censored = !row.legacy_s && !cfg.compact_only;
    compact_dead = compact_dead || row.compact_censored;
    legacy_dead = legacy_dead || row.legacy_censored;
    if (progress) progress(row);
    rows.push_back(row);
  }
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "# reference points from the original hardware: 99 edges 6.1x, 1540 edges 348.1x\n";
  os << "edges,legacy_s,compact_s,speedup,legacy_censored,compact_censored\n";
  auto num = [&](const std::optional<double>& v) {
    if (v) os << *v;
  };
  os.precision(6);
  for (const auto& r : rows) {
    os << r.edges << ',';
    num(r.legacy_s);
    os << ',';
    num(r.compact_s);
    os << ',';
    num(r.speedup());
    os << ',' << (r.legacy_censored ? 1 : 0) << ',' << (r.compact_censored ? 1 : 0) << '\n';
  }
}

}  // namespace delin
