#pragma once

#include <numeric>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "delin/classifier.hpp"
#include "delin/instance_gen.hpp"
#include "delin/loops.hpp"

namespace delin {

/// Simulation protocol: every trial draws its own planted test instance (and
/// a training instance for the classifier), both seeded from `seed` and the
/// trial index.
struct ExperimentSpec {
  GenSpec instance;
  std::optional<GenSpec> train;  // defaults to `instance` with its own seed
  int n_init = 10;
  int batch = 4;
  int al_budget = 50;
  int proof_budget = 35;
  int trials = 30;
  std::uint64_t seed = 1;
  int workers = 1;
  int probe_workers = 1;
  std::optional<double> time_limit;
  std::vector<std::string> strategies = {"random", "uncertainty", "delta_cost"};
  std::vector<std::string> criteria = {"s_score", "cost_only", "random", "uncertainty"};
  std::vector<std::pair<std::string, std::string>> pipelines = {{"delta_cost", "s_score"}, {"random", "random"}};

  Mode mode() const { return instance.mode; }

  SolveOptions solve() const {
    SolveOptions o;
    o.time_limit = time_limit;
    return o;
  }
};

inline nlohmann::json to_json(const ExperimentSpec& s) {
  nlohmann::json j = {{"instance", to_json(s.instance)},
                      {"n_init", s.n_init},
                      {"batch", s.batch},
                      {"al_budget", s.al_budget},
                      {"proof_budget", s.proof_budget},
                      {"trials", s.trials},
                      {"seed", s.seed},
                      {"workers", s.workers},
                      {"probe_workers", s.probe_workers},
                      {"strategies", s.strategies},
                      {"criteria", s.criteria},
                      {"pipelines", s.pipelines}};
  if (s.train) j["train"] = to_json(*s.train);
  if (s.time_limit) j["time_limit"] = *s.time_limit;
  return j;
}

inline ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::parse, "experiment spec: expected an object");
  ExperimentSpec s;
  for (const auto& [key, val] : j.items()) {
    try {
      if (key == "instance") s.instance = gen_spec_from_json(val);
      else if (key == "train") s.train = gen_spec_from_json(val);
      else if (key == "n_init") s.n_init = val.get<int>();
      else if (key == "batch") s.batch = val.get<int>();
      else if (key == "al_budget" || key == "budget") s.al_budget = val.get<int>();
      else if (key == "proof_budget") s.proof_budget = val.get<int>();
      else if (key == "trials") s.trials = val.get<int>();
      else if (key == "seed") s.seed = val.get<std::uint64_t>();
      else if (key == "workers") s.workers = val.get<int>();
      else if (key == "probe_workers") s.probe_workers = val.get<int>();
      else if (key == "time_limit") s.time_limit = val.get<double>();
      else if (key == "strategies") s.strategies = val.get<std::vector<std::string>>();
      else if (key == "criteria") s.criteria = val.get<std::vector<std::string>>();
      else if (key == "pipelines") s.pipelines = val.get<std::vector<std::pair<std::string, std::string>>>();
      else fail(ErrorCode::parse, "experiment spec: unknown field '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::parse, "experiment spec: field '" + key + "' has the wrong type");
    }
  }
  if (s.trials < 1) fail(ErrorCode::invalid_argument, "trials must be >= 1");
  return s;
}

inline Graph trial_instance(const ExperimentSpec& s, int trial, bool train = false) {
  GenSpec g = train && s.train ? *s.train : s.instance;
  g.seed = Rng::derive(Rng::derive(s.seed, train ? 2 : 1), static_cast<std::uint64_t>(trial));
  return planted_instance(g);
}

inline std::uint64_t trial_stream(const ExperimentSpec& s, int trial) {
  return Rng::derive(Rng::derive(s.seed, 3), static_cast<std::uint64_t>(trial));
}

/// Classifier fitted on every edge of the trial's training instance.
inline std::unique_ptr<Classifier> trained_classifier(const Graph& train) {
  std::vector<EdgeId> all(static_cast<std::size_t>(train.n_edges()));
  std::iota(all.begin(), all.end(), 0);
  auto C = default_classifier();
  C->fit(examples_for(train, all));
  return C;
}

inline AlConfig al_config(const ExperimentSpec& s, AlStrategy strategy) {
  AlConfig c;
  c.strategy = strategy;
  c.mode = s.mode();
  c.n_init = s.n_init;
  c.batch = s.batch;
  c.budget = s.al_budget;
  c.trials = s.trials;
  c.seed = s.seed;
  c.probe_workers = s.probe_workers;
  c.solve = s.solve();
  return c;
}

inline ProofConfig proof_config(const ExperimentSpec& s, ProofCriterion criterion) {
  ProofConfig c;
  c.criterion = criterion;
  c.mode = s.mode();
  c.batch = s.batch;
  c.budget = s.proof_budget;
  c.trials = s.trials;
  c.seed = s.seed;
  c.probe_workers = s.probe_workers;
  c.solve = s.solve();
  return c;
}

inline TrialCurve al_experiment(const ExperimentSpec& s, AlStrategy strategy) {
  const auto cfg = al_config(s, strategy);
  return run_trials(s.trials, s.workers, [&](int t) {
    return al_trial(trial_instance(s, t), cfg, trial_stream(s, t)).series;
  });
}

inline TrialCurve proofread_experiment(const ExperimentSpec& s, ProofCriterion criterion) {
  const auto cfg = proof_config(s, criterion);
  return run_trials(s.trials, s.workers, [&](int t) {
    const auto test = trial_instance(s, t);
    const auto C = trained_classifier(trial_instance(s, t, true));
    const GroundTruthOracle oracle(test);
    return proofread_trial(test, weights_from_classifier(*C, test), oracle, cfg, trial_stream(s, t)).series;
  });
}

inline TrialCurve pipeline_experiment(const ExperimentSpec& s, AlStrategy strategy, ProofCriterion criterion) {
  PipelineConfig cfg;
  cfg.al = al_config(s, strategy);
  cfg.proof = proof_config(s, criterion);
  return run_trials(s.trials, s.workers, [&](int t) {
    return pipeline_trial(trial_instance(s, t, true), trial_instance(s, t), cfg, trial_stream(s, t));
  });
}

}  // namespace delin
