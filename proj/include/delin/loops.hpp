#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "delin/attention.hpp"
#include "delin/classifier.hpp"
#include "delin/error.hpp"
#include "delin/graph.hpp"
#include "delin/random.hpp"
#include "delin/solver.hpp"

namespace delin {

enum class AlStrategy { random, uncertainty, delta_cost };
enum class ProofCriterion { s_score, cost_only, random, uncertainty };

inline std::string_view to_string(AlStrategy s) {
  switch (s) {
    case AlStrategy::random: return "random";
    case AlStrategy::uncertainty: return "uncertainty";
    case AlStrategy::delta_cost: return "delta_cost";
  }
  return "unknown";
}

inline std::string_view to_string(ProofCriterion c) {
  switch (c) {
    case ProofCriterion::s_score: return "s_score";
    case ProofCriterion::cost_only: return "cost_only";
    case ProofCriterion::random: return "random";
    case ProofCriterion::uncertainty: return "uncertainty";
  }
  return "unknown";
}

inline AlStrategy parse_al_strategy(std::string_view s) {
  if (s == "random") return AlStrategy::random;
  if (s == "uncertainty") return AlStrategy::uncertainty;
  if (s == "delta_cost") return AlStrategy::delta_cost;
  fail(ErrorCode::invalid_argument, "unknown strategy '" + std::string(s) + "' (expected random|uncertainty|delta_cost)");
}

inline ProofCriterion parse_proof_criterion(std::string_view s) {
  if (s == "s_score") return ProofCriterion::s_score;
  if (s == "cost_only") return ProofCriterion::cost_only;
  if (s == "random") return ProofCriterion::random;
  if (s == "uncertainty") return ProofCriterion::uncertainty;
  fail(ErrorCode::invalid_argument,
       "unknown criterion '" + std::string(s) + "' (expected s_score|cost_only|random|uncertainty)");
}

/// One series per trial over a shared x axis (cumulative labels).
struct TrialCurve {
  std::vector<int> x;
  std::vector<std::vector<double>> trials;
  std::vector<double> mean;

  double final_mean() const { return mean.empty() ? 0.0 : mean.back(); }
};

struct TrialSeries {
  std::vector<int> x;
  std::vector<double> y;
};

using ClassifierFactory = std::function<std::unique_ptr<Classifier>()>;

inline std::unique_ptr<Classifier> default_classifier() { return std::make_unique<LogisticRegression>(); }

struct AlConfig {
  AlStrategy strategy = AlStrategy::delta_cost;
  Mode mode = Mode::tree;
  int n_init = 10;
  int batch = 4;
  int budget = 50;
  int trials = 30;
  std::uint64_t seed = 1;
  int workers = 1;        // trials in parallel
  int probe_workers = 1;  // delta-c probes in parallel within a trial
  SolveOptions solve;
  ClassifierFactory classifier = default_classifier;
};

struct ProofConfig {
  ProofCriterion criterion = ProofCriterion::s_score;
  Mode mode = Mode::tree;
  int batch = 4;
  int budget = 35;
  int trials = 30;
  std::uint64_t seed = 1;
  int workers = 1;
  int probe_workers = 1;
  SolveOptions solve;
};

namespace detail {

inline Reconstruction solve_weights(const Graph& G, Mode mode, std::span<const double> W, const SolveOptions& base,
                                    const std::optional<Reconstruction>& warm = std::nullopt) {
  SolveOptions o = base;
  o.warm_start = warm;
  return solve(build_compact(G, mode, W), o).reconstruction;
}

/// Fraction of `ids` whose predicted class (w < 0 means positive) matches the ground truth.
inline double accuracy(const Graph& G, std::span<const double> W, std::span<const EdgeId> ids) {
  if (ids.empty()) return 0.0;
  int hit = 0;
  for (EdgeId e : ids) {
    const bool predicted = W[static_cast<std::size_t>(e)] < 0.0;
    if (predicted == (G.edge(e).gt == GtLabel::positive)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(ids.size());
}

/// The k unlabeled edges with the smallest |w|, ties by ascending id.
inline std::vector<EdgeId> least_certain(std::span<const double> W, std::vector<EdgeId> pool, int k) {
  std::stable_sort(pool.begin(), pool.end(), [&](EdgeId a, EdgeId b) {
    return std::abs(W[static_cast<std::size_t>(a)]) < std::abs(W[static_cast<std::size_t>(b)]);
  });
  pool.resize(std::min(pool.size(), static_cast<std::size_t>(k)));
  return pool;
}

inline std::vector<EdgeId> random_pick(Rng& rng, std::vector<EdgeId> pool, int k) {
  rng.shuffle(pool);
  pool.resize(std::min(pool.size(), static_cast<std::size_t>(k)));
  return pool;
}

inline std::vector<EdgeId> complement(int n, const std::vector<char>& taken) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < n; ++e)
    if (!taken[static_cast<std::size_t>(e)]) out.push_back(e);
  return out;
}

inline TrialCurve collect(std::vector<TrialSeries> runs) {
  TrialCurve c;
  if (runs.empty()) return c;
  c.x = runs.front().x;
  for (auto& r : runs) {
    if (r.x != c.x) fail(ErrorCode::precondition, "trial curves have different x axes");
    c.trials.push_back(std::move(r.y));
  }
  c.mean.assign(c.x.size(), 0.0);
  for (const auto& t : c.trials)
    for (std::size_t i = 0; i < t.size(); ++i) c.mean[i] += t[i];
  for (auto& m : c.mean) m /= static_cast<double>(c.trials.size());
  return c;
}

}  // namespace detail

struct AlTrial {
  TrialSeries series;
  std::unique_ptr<Classifier> classifier;
  std::vector<EdgeId> labeled;  // in query order
};

/// Called after every fit with the number of labels used and the fitted classifier.
using AlObserver = std::function<void(int labels, const Classifier& C)>;

/// One active-learning trial on G with the simulated oracle.
inline AlTrial al_trial(const Graph& G, const AlConfig& cfg, std::uint64_t trial_seed, const AlObserver& observe = {}) {
  const int n = G.n_edges();
  if (!G.has_gt()) fail(ErrorCode::precondition, "active learning needs ground-truth labels");
  if (cfg.n_init < 1 || cfg.batch < 1) fail(ErrorCode::invalid_argument, "n_init and batch must be >= 1");
  if (cfg.budget < cfg.n_init || cfg.budget > n) {
    fail(ErrorCode::invalid_argument, "budget must lie in [n_init, |E|]");
  }
  const GroundTruthOracle oracle(G);
  Rng rng(trial_seed);
  std::vector<EdgeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  AlTrial out;
  out.labeled.assign(order.begin(), order.begin() + cfg.n_init);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (EdgeId e : out.labeled) taken[static_cast<std::size_t>(e)] = 1;

  for (;;) {
    std::vector<Example> train;
    for (EdgeId e : out.labeled) train.push_back({G.edge(e).features, oracle.label(e) == GtLabel::positive});
    out.classifier = cfg.classifier();
    out.classifier->fit(train);
    const auto W = weights_from_classifier(*out.classifier, G);
    const auto pool = detail::complement(n, taken);
    const int used = static_cast<int>(out.labeled.size());
    out.series.x.push_back(used);
    if (pool.empty()) {
      std::vector<EdgeId> all(static_cast<std::size_t>(n));
      std::iota(all.begin(), all.end(), 0);
      out.series.y.push_back(detail::accuracy(G, W, all));
    } else {
      out.series.y.push_back(detail::accuracy(G, W, pool));
    }
    if (observe) observe(used, *out.classifier);
    if (used >= cfg.budget) break;

    const int k = std::min(cfg.batch, cfg.budget - used);
    std::vector<EdgeId> picked;
    switch (cfg.strategy) {
      case AlStrategy::random: picked = detail::random_pick(rng, pool, k); break;
      case AlStrategy::uncertainty: picked = detail::least_certain(W, pool, k); break;
      case AlStrategy::delta_cost: {
        const auto R = detail::solve_weights(G, cfg.mode, W, cfg.solve);
        AttentionOptions ao;
        ao.solve = cfg.solve;
        ao.workers = cfg.probe_workers;
        const auto scores = score_edges(G, cfg.mode, W, R, pool, ao);
        picked = rank_edges(scores, RankKey::delta_c, k);
        break;
      }
    }
    for (EdgeId e : picked) {
      taken[static_cast<std::size_t>(e)] = 1;
      out.labeled.push_back(e);
    }
  }
  return out;
}

/// Mean accuracy curve over cfg.trials independent trials on G.
inline TrialCurve al_run(const Graph& G, const AlConfig& cfg) {
  std::vector<TrialSeries> runs(static_cast<std::size_t>(cfg.trials));
  detail::parallel_for(cfg.trials, cfg.workers, [&](int t) {
    runs[static_cast<std::size_t>(t)] =
        al_trial(G, cfg, Rng::derive(cfg.seed, static_cast<std::uint64_t>(t))).series;
  });
  return detail::collect(std::move(runs));
}

struct ProofTrial {
  TrialSeries series;
  Reconstruction reconstruction;
  std::vector<EdgeId> verified;  // in query order
  WeightMap weights;
};

/// One proofreading trial: start from W0, verify `batch` edges at a time,
/// pin each answer to A (positive) or B (negative), re-solve, and record the
/// topology score against the ground truth.
inline ProofTrial proofread_trial(const Graph& G, std::span<const double> W0, const Oracle& oracle,
                                  const ProofConfig& cfg, std::uint64_t trial_seed, int x_offset = 0) {
  const int n = G.n_edges();
  if (cfg.batch < 1) fail(ErrorCode::invalid_argument, "batch must be >= 1");
  if (cfg.budget < 0 || cfg.budget > n) fail(ErrorCode::invalid_argument, "budget must lie in [0, |E|]");
  if (W0.size() != static_cast<std::size_t>(n)) fail(ErrorCode::invalid_argument, "weight map size mismatch");
  const auto gt = G.gt_edges();
  Rng rng(trial_seed);

  ProofTrial out;
  out.weights.assign(W0.begin(), W0.end());
  auto& W = out.weights;
  std::vector<char> verified(static_cast<std::size_t>(n), 0);
  out.reconstruction = detail::solve_weights(G, cfg.mode, W, cfg.solve);
  int used = 0;
  out.series.x.push_back(x_offset);
  out.series.y.push_back(topology_score(out.reconstruction.edges, gt, G));

  while (used < cfg.budget) {
    const auto pool = detail::complement(n, verified);
    if (pool.empty()) break;
    const int k = std::min(cfg.batch, cfg.budget - used);
    const auto stats = weight_stats(W);
    std::vector<EdgeId> picked;
    switch (cfg.criterion) {
      case ProofCriterion::random: picked = detail::random_pick(rng, pool, k); break;
      case ProofCriterion::uncertainty: picked = detail::least_certain(W, pool, k); break;
      case ProofCriterion::s_score:
      case ProofCriterion::cost_only: {
        AttentionOptions ao;
        ao.solve = cfg.solve;
        ao.workers = cfg.probe_workers;
        ao.stats = stats;
        const auto scores = score_edges(G, cfg.mode, W, out.reconstruction, pool, ao);
        picked = rank_edges(scores, cfg.criterion == ProofCriterion::s_score ? RankKey::s : RankKey::delta_c, k);
        break;
      }
    }
    for (EdgeId e : picked) {
      verified[static_cast<std::size_t>(e)] = 1;
      out.verified.push_back(e);
      W[static_cast<std::size_t>(e)] = oracle.label(e) == GtLabel::positive ? stats.A : stats.B;
    }
    used += static_cast<int>(picked.size());
    out.reconstruction = detail::solve_weights(G, cfg.mode, W, cfg.solve, out.reconstruction);
    out.series.x.push_back(x_offset + used);
    out.series.y.push_back(topology_score(out.reconstruction.edges, gt, G));
  }
  return out;
}

/// Proofreading curve on one graph with classifier C; trials differ only in
/// the random stream, so deterministic criteria give identical trials.
inline TrialCurve proofread_run(const Graph& G, const Classifier& C, const ProofConfig& cfg) {
  const GroundTruthOracle oracle(G);
  const auto W0 = weights_from_classifier(C, G);
  std::vector<TrialSeries> runs(static_cast<std::size_t>(cfg.trials));
  detail::parallel_for(cfg.trials, cfg.workers, [&](int t) {
    runs[static_cast<std::size_t>(t)] =
        proofread_trial(G, W0, oracle, cfg, Rng::derive(cfg.seed, static_cast<std::uint64_t>(t))).series;
  });
  return detail::collect(std::move(runs));
}

struct PipelineConfig {
  AlConfig al;        // al.budget = 0 keeps only the n_init seed labels
  ProofConfig proof;  // proof.budget = 0 stops after active learning
  int trials = 30;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Active learning on G_train, then proofreading on G_test with the frozen
/// classifier. The metric is the topology score on G_test throughout; x is
/// the total number of human labels.
inline TrialSeries pipeline_trial(const Graph& G_train, const Graph& G_test, const PipelineConfig& cfg,
                                  std::uint64_t trial_seed) {
  if (!G_test.has_gt() || !G_test.has_features()) {
    fail(ErrorCode::precondition, "test graph needs features and ground truth");
  }
  auto al = cfg.al;
  al.budget = std::max(al.budget, al.n_init);
  const auto gt = G_test.gt_edges();
  TrialSeries out;
  auto trial = al_trial(G_train, al, Rng::derive(trial_seed, 0), [&](int labels, const Classifier& C) {
    const auto W = weights_from_classifier(C, G_test);
    const auto R = detail::solve_weights(G_test, cfg.proof.mode, W, cfg.proof.solve);
    out.x.push_back(labels);
    out.y.push_back(topology_score(R.edges, gt, G_test));
  });
  const int offset = out.x.back();
  const GroundTruthOracle oracle(G_test);
  const auto W0 = weights_from_classifier(*trial.classifier, G_test);
  const auto proof = proofread_trial(G_test, W0, oracle, cfg.proof, Rng::derive(trial_seed, 1), offset);
  for (std::size_t i = 1; i < proof.series.x.size(); ++i) {
    out.x.push_back(proof.series.x[i]);
    out.y.push_back(proof.series.y[i]);
  }
  return out;
}

inline TrialCurve pipeline_run(const Graph& G_train, const Graph& G_test, const PipelineConfig& cfg) {
  std::vector<TrialSeries> runs(static_cast<std::size_t>(cfg.trials));
  detail::parallel_for(cfg.trials, cfg.workers, [&](int t) {
    runs[static_cast<std::size_t>(t)] =
        pipeline_trial(G_train, G_test, cfg, Rng::derive(cfg.seed, static_cast<std::uint64_t>(t)));
  });
  return detail::collect(std::move(runs));
}

/// Runs `trial(t)` for t in [0, trials) and averages; used when every trial
/// draws its own instance.
template <class F>
TrialCurve run_trials(int trials, int workers, F&& trial) {
  std::vector<TrialSeries> runs(static_cast<std::size_t>(trials));
  detail::parallel_for(trials, workers, [&](int t) { runs[static_cast<std::size_t>(t)] = trial(t); });
  return detail::collect(std::move(runs));
}

inline void write_curve_csv(std::ostream& os, const TrialCurve& c) {
  os << "trial,step,labels_used,metric\n";
  os.precision(17);
  for (std::size_t t = 0; t < c.trials.size(); ++t)
    for (std::size_t i = 0; i < c.x.size(); ++i)
      os << t << ',' << i << ',' << c.x[i] << ',' << c.trials[t][i] << '\n';
}

inline void write_mean_curve_csv(std::ostream& os, const TrialCurve& c) {
  os << "step,labels_used,metric\n";
  os.precision(17);
  for (std::size_t i = 0; i < c.x.size(); ++i) os << i << ',' << c.x[i] << ',' << c.mean[i] << '\n';
}

}  // namespace delin
