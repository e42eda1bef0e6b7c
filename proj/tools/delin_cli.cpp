// Command-line entry point: solve, bench, gen, al, proofread, pipeline, lp, serve.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "delin/delin.hpp"
#include "delin/experiment.hpp"
#include "delin/service_http.hpp"

namespace fs = std::filesystem;
using namespace delin;

namespace {

/// Input problems the user can fix by changing the invocation.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Graph load_input_graph(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("graph file not found: " + path);
  return load_graph(path);
}

nlohmann::json load_json_file(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("spec file not found: " + path);
  const auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text, const RunManifest& m) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_file(path, text);
  write_manifest(path, m);
}

template <class F>
std::string to_text(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

std::vector<int> parse_ladder(const std::string& s) {
  if (s == "compare") return {kCompareLadder.begin(), kCompareLadder.end()};
  if (s == "extended") {
    std::vector<int> v(kCompareLadder.begin(), kCompareLadder.end());
    v.insert(v.end(), kExtendedLadder.begin(), kExtendedLadder.end());
    return v;
  }
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw UsageError("bad ladder entry '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("ladder is empty");
  return out;
}

struct Common {
  std::string graph;
  std::string mode;
  std::string formulation = "compact";
  std::uint64_t seed = 1;
  int trials = -1;
  int batch = -1;
  int budget = -1;
  double time_limit = 0.0;
  int workers = 1;
  std::string out;
  std::string spec;
};

void add_time_workers(CLI::App* c, Common& o) {
  c->add_option("--time-limit", o.time_limit, "Solver time limit in seconds (0 = none)")->envname("DELIN_TIME_LIMIT");
  c->add_option("--workers", o.workers, "Worker threads")->envname("DELIN_WORKERS");
}

ExperimentSpec experiment(const Common& o, CLI::App* c) {
  ExperimentSpec s = o.spec.empty() ? ExperimentSpec{} : experiment_from_json(load_json_file(o.spec));
  if (c->count("--seed")) s.seed = o.seed;
  if (o.trials > 0) s.trials = o.trials;
  if (o.batch > 0) s.batch = o.batch;
  if (o.time_limit > 0) s.time_limit = o.time_limit;
  s.workers = o.workers;
  if (!o.mode.empty()) s.instance.mode = parse_mode(o.mode);
  return s;
}

void write_curve(const std::string& dir, const std::string& name, const TrialCurve& c, const RunManifest& m) {
  write_text((fs::path(dir) / (name + ".csv")).string(), to_text([&](std::ostream& os) { write_curve_csv(os, c); }),
             m);
  write_text((fs::path(dir) / (name + "_mean.csv")).string(),
             to_text([&](std::ostream& os) { write_mean_curve_csv(os, c); }), m);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delineation by tree/subgraph MIP, attention ranking and annotation loops.\n"
               "Every option can also be set through the environment, e.g. DELIN_SEED, DELIN_WORKERS."};
  app.require_subcommand(1);
  Common o;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one graph exactly");
  solve_cmd->add_option("--graph", o.graph, "Graph file")->required()->envname("DELIN_GRAPH");
  solve_cmd->add_option("--mode", o.mode, "tree|subgraph (default: the graph's mode)")->envname("DELIN_MODE");
  solve_cmd->add_option("--formulation", o.formulation, "compact|legacy")->envname("DELIN_FORMULATION");
  solve_cmd->add_option("--out", o.out, "Write the reconstruction as JSON")->envname("DELIN_OUT");
  std::string lp_backend = "dual_simplex";
  bool no_cuts = false;
  solve_cmd->add_option("--lp", lp_backend, "dual_simplex|none")->envname("DELIN_LP");
  solve_cmd->add_flag("--no-cuts", no_cuts, "Disable connectivity cuts");
  add_time_workers(solve_cmd, o);

  auto* bench_cmd = app.add_subcommand("bench", "Time both formulations on the random-graph ladder");
  std::string ladder = "compare";
  int legacy_trials = -1;
  bool compact_only = false;
  double cap = 300.0;
  bench_cmd->add_option("--ladder", ladder, "compare|extended|comma-separated edge counts")->envname("DELIN_LADDER");
  bench_cmd->add_option("--trials", o.trials, "Timed runs per size (default 5)")->envname("DELIN_TRIALS");
  bench_cmd->add_option("--legacy-trials", legacy_trials, "Timed legacy runs per size (default: --trials)");
  bench_cmd->add_option("--cap", cap, "Per-solve cap in seconds; slower sizes are censored")->envname("DELIN_CAP");
  bench_cmd->add_flag("--compact-only", compact_only, "Skip the legacy formulation");
  bench_cmd->add_option("--seed", o.seed)->envname("DELIN_SEED");
  bench_cmd->add_option("--mode", o.mode, "tree|subgraph")->envname("DELIN_MODE");
  bench_cmd->add_option("--workers", o.workers, "Solver worker threads")->envname("DELIN_WORKERS");
  bench_cmd->add_option("--out", o.out, "CSV path")->required()->envname("DELIN_OUT");

  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance");
  std::string kind = "planted";
  int n_vertices = 0, n_edges = 0, n_terminals = 2;
  gen_cmd->add_option("--kind", kind, "planted|random|steiner")->envname("DELIN_KIND");
  gen_cmd->add_option("--spec", o.spec, "Generator spec JSON (planted)")->envname("DELIN_SPEC");
  gen_cmd->add_option("--vertices", n_vertices, "Vertex count (random, steiner)");
  gen_cmd->add_option("--edges", n_edges, "Edge count (random, steiner)");
  gen_cmd->add_option("--terminals", n_terminals, "Terminal count (steiner)");
  gen_cmd->add_option("--seed", o.seed)->envname("DELIN_SEED");
  gen_cmd->add_option("--mode", o.mode, "tree|subgraph")->envname("DELIN_MODE");
  gen_cmd->add_option("--out", o.out, "Graph file")->required()->envname("DELIN_OUT");

  auto* al_cmd = app.add_subcommand("al", "Active-learning curves, one per strategy");
  auto* proof_cmd = app.add_subcommand("proofread", "Proofreading curves, one per criterion");
  auto* pipe_cmd = app.add_subcommand("pipeline", "Active learning followed by proofreading");
  for (auto* c : {al_cmd, proof_cmd, pipe_cmd}) {
    c->add_option("--spec", o.spec, "Experiment spec JSON")->envname("DELIN_SPEC");
    c->add_option("--seed", o.seed)->envname("DELIN_SEED");
    c->add_option("--trials", o.trials, "Trials (default 30)")->envname("DELIN_TRIALS");
    c->add_option("--batch", o.batch, "Queries per round (default 4)")->envname("DELIN_BATCH");
    c->add_option("--budget", o.budget, "Label budget")->envname("DELIN_BUDGET");
    c->add_option("--mode", o.mode, "tree|subgraph")->envname("DELIN_MODE");
    c->add_option("--out", o.out, "Output directory")->required()->envname("DELIN_OUT");
    add_time_workers(c, o);
  }

  auto* lp_cmd = app.add_subcommand("lp", "Export the MIP in LP format");
  lp_cmd->add_option("--graph", o.graph, "Graph file")->required()->envname("DELIN_GRAPH");
  lp_cmd->add_option("--mode", o.mode, "tree|subgraph")->envname("DELIN_MODE");
  lp_cmd->add_option("--formulation", o.formulation, "compact|legacy")->envname("DELIN_FORMULATION");
  lp_cmd->add_option("--out", o.out, "LP file")->required()->envname("DELIN_OUT");

  auto* serve_cmd = app.add_subcommand("serve", "Run the annotation session service");
  std::string listen = "127.0.0.1:8080";
  ServiceConfig svc_cfg;
  serve_cmd->add_option("--listen", listen, "host:port (port 0 picks a free port)")->envname("DELIN_LISTEN");
  serve_cmd->add_option("--data-dir", svc_cfg.data_dir, "Session storage directory")->envname("DELIN_DATA_DIR");
  serve_cmd->add_option("--time-limit", svc_cfg.solver_time_limit, "Solver time limit per request (s)")
      ->envname("DELIN_TIME_LIMIT");
  serve_cmd->add_option("--workers", svc_cfg.workers, "Probe worker threads")->envname("DELIN_WORKERS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.command = app.get_subcommands().front()->get_name();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  try {
    if (solve_cmd->parsed()) {
      const auto g = load_input_graph(o.graph);
      const Mode mode = o.mode.empty() ? g.mode() : parse_mode(o.mode);
      SolveOptions so;
      if (o.time_limit > 0) so.time_limit = o.time_limit;
      so.parallel_workers = o.workers;
      so.lp = parse_lp_backend(lp_backend);
      so.cuts = !no_cuts;
      const auto r = solve(g, so, parse_formulation(o.formulation), mode);
      const auto& R = r.reconstruction;
      std::ostringstream edges;
      for (std::size_t i = 0; i < R.edges.size(); ++i) edges << (i ? " " : "") << R.edges[i];
      std::cout.precision(17);
      std::cout << "cost " << R.cost << "\nstatus " << to_string(R.status) << "\nbound " << r.best_bound
                << "\nedges " << edges.str() << "\nnodes " << r.nodes_explored << "\n";
      if (!o.out.empty()) {
        manifest.config = {{"graph", o.graph}, {"mode", std::string(to_string(mode))},
                           {"formulation", o.formulation}, {"time_limit", o.time_limit},
                           {"workers", o.workers}, {"lp", lp_backend}, {"cuts", !no_cuts}};
        manifest.wall_clock = elapsed();
        write_text(o.out, detail::to_json(R).dump(1) + "\n", manifest);
      }
      return 0;
    }

    if (bench_cmd->parsed()) {
      BenchConfig bc;
      bc.ladder = parse_ladder(ladder);
      if (o.trials > 0) bc.trials = o.trials;
      bc.legacy_trials = legacy_trials;
      bc.cap = cap;
      bc.seed = o.seed;
      bc.mode = o.mode.empty() ? Mode::tree : parse_mode(o.mode);
      bc.workers = o.workers;
      bc.compact_only = compact_only;
      const auto rows = run_bench(bc, [](const BenchRow& r) {
        std::cerr << "edges " << r.edges << ": compact " << (r.compact_s ? std::to_string(*r.compact_s) : "censored")
                  << ", legacy " << (r.legacy_s ? std::to_string(*r.legacy_s) : "censored") << "\n";
      });
      manifest.config = {{"ladder", bc.ladder}, {"trials", bc.trials}, {"legacy_trials", legacy_trials},
                         {"cap", cap}, {"mode", std::string(to_string(bc.mode))}, {"workers", bc.workers},
                         {"warmup", bc.warmup}, {"compact_only", compact_only}};
      manifest.seeds = {o.seed};
      manifest.wall_clock = elapsed();
      write_text(o.out, to_text([&](std::ostream& os) { write_bench_csv(os, rows); }), manifest);
      return 0;
    }

    if (gen_cmd->parsed()) {
      Graph g;
      if (kind == "planted") {
        GenSpec gs = o.spec.empty() ? GenSpec{} : gen_spec_from_json(load_json_file(o.spec));
        if (gen_cmd->count("--seed")) gs.seed = o.seed;
        if (!o.mode.empty()) gs.mode = parse_mode(o.mode);
        if (n_vertices > 0) gs.n_vertices = n_vertices;
        if (n_edges > 0) gs.n_edges = n_edges;
        g = planted_instance(gs);
        manifest.config = to_json(gs);
        manifest.seeds = {gs.seed};
      } else if (kind == "random") {
        if (n_vertices <= 0 || n_edges <= 0) throw UsageError("random graphs need --vertices and --edges");
        g = random_weight_graph(n_vertices, n_edges, o.seed);
        if (!o.mode.empty()) g = g.with_mode(parse_mode(o.mode));
        manifest.config = {{"kind", kind}, {"vertices", n_vertices}, {"edges", n_edges}};
        manifest.seeds = {o.seed};
      } else if (kind == "steiner") {
        if (n_vertices <= 0 || n_edges <= 0) throw UsageError("steiner instances need --vertices and --edges");
        g = steiner_reduce(random_steiner_instance(n_vertices, n_edges, n_terminals, o.seed));
        manifest.config = {{"kind", kind}, {"vertices", n_vertices}, {"edges", n_edges}, {"terminals", n_terminals}};
        manifest.seeds = {o.seed};
      } else {
        throw UsageError("unknown --kind '" + kind + "'");
      }
      manifest.wall_clock = elapsed();
      write_text(o.out, dump_graph(g), manifest);
      return 0;
    }

    if (al_cmd->parsed() || proof_cmd->parsed() || pipe_cmd->parsed()) {
      auto* cmd = al_cmd->parsed() ? al_cmd : proof_cmd->parsed() ? proof_cmd : pipe_cmd;
      auto spec = experiment(o, cmd);
      if (o.budget >= 0) (cmd == proof_cmd ? spec.proof_budget : spec.al_budget) = o.budget;
      manifest.config = to_json(spec);
      manifest.seeds = {spec.seed};
      if (cmd == al_cmd) {
        for (const auto& name : spec.strategies) {
          const auto c = al_experiment(spec, parse_al_strategy(name));
          manifest.wall_clock = elapsed();
          write_curve(o.out, "al_" + name, c, manifest);
          std::cout << "al " << name << " final " << c.final_mean() << "\n";
        }
      } else if (cmd == proof_cmd) {
        for (const auto& name : spec.criteria) {
          const auto c = proofread_experiment(spec, parse_proof_criterion(name));
          manifest.wall_clock = elapsed();
          write_curve(o.out, "proofread_" + name, c, manifest);
          std::cout << "proofread " << name << " final " << c.final_mean() << "\n";
        }
      } else {
        for (const auto& [al, pr] : spec.pipelines) {
          const auto c = pipeline_experiment(spec, parse_al_strategy(al), parse_proof_criterion(pr));
          manifest.wall_clock = elapsed();
          write_curve(o.out, "pipeline_" + al + "_" + pr, c, manifest);
          std::cout << "pipeline " << al << "+" << pr << " final " << c.final_mean() << "\n";
        }
      }
      return 0;
    }

    if (lp_cmd->parsed()) {
      const auto g = load_input_graph(o.graph);
      const Mode mode = o.mode.empty() ? g.mode() : parse_mode(o.mode);
      const auto m = build_model(g, mode, parse_formulation(o.formulation));
      manifest.config = {{"graph", o.graph}, {"mode", std::string(to_string(mode))}, {"formulation", o.formulation}};
      manifest.wall_clock = elapsed();
      write_text(o.out, to_text([&](std::ostream& os) { write_lp(m, os); }), manifest);
      return 0;
    }

    if (serve_cmd->parsed()) {
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw UsageError("--listen expects host:port");
      const auto host = listen.substr(0, colon);
      int port = 0;
      try {
        port = std::stoi(listen.substr(colon + 1));
      } catch (const std::exception&) {
        throw UsageError("bad port in --listen");
      }
      SessionService svc(svc_cfg);
      httplib::Server server;
      register_routes(server, svc);
      if (port == 0) {
        port = server.bind_to_any_port(host);
      } else if (!server.bind_to_port(host, port)) {
        port = -1;
      }
      if (port < 0) fail(ErrorCode::io, "cannot listen on " + listen);
      std::cout << "listening on " << host << ":" << port << std::endl;
      server.listen_after_bind();
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::invalid_argument ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
