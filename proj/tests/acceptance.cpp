// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include <httplib.h>
#include <sys/wait.h>
#include <unistd.h>

#include "delin/delin.hpp"
#include "delin/experiment.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace delin;

namespace {

const std::string kCli = DELIN_CLI;
const std::string kData = std::string(DELIN_SOURCE_DIR) + "/data";

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("delin_accept_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// FNV-1a, 64 bit
std::uint64_t hash_bytes(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int run_cli(const std::string& args, std::string* out = nullptr) {
  FILE* p = popen((kCli + " " + args + " 2>/dev/null").c_str(), "r");
  if (!p) return -1;
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) text.append(buf, n);
  const int status = pclose(p);
  if (out) *out = text;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0, mismatches = 0;
  std::string first_bad;
  for (Mode mode : {Mode::tree, Mode::subgraph}) {
    for (int i = 0; i < 200; ++i) {
      const int nv = 4 + i % 5;  // 4..8 vertices
      const int max_e = std::min(12, nv * (nv - 1) / 2);
      const int ne = nv - 1 + (i / 5) % (max_e - nv + 2);
      const auto g = random_weight_graph(nv, ne, 1000 + static_cast<std::uint64_t>(i));
      const double a = solve(g, {}, Formulation::compact, mode).reconstruction.cost;
      const double b = brute_force(g, mode).cost;
      ++checked;
      if (a != b) {
        ++mismatches;
        if (first_bad.empty()) first_bad = " first at instance " + std::to_string(i) + " " + fmt(a, 17) + " vs " + fmt(b, 17);
      }
    }
  }
  report("oracle equivalence", mismatches == 0,
         std::to_string(checked - mismatches) + "/" + std::to_string(checked) + " exact matches in " +
             fmt(elapsed_s(t0), 3) + " s" + first_bad);
}

void formulation_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int e = 11 + i;  // 11..60 edges
    const auto g = random_weight_graph(std::max(6, ladder_vertices(e)), e, 2000 + static_cast<std::uint64_t>(i));
    const Mode mode = i % 2 ? Mode::subgraph : Mode::tree;
    const auto c = solve(g, {}, Formulation::compact, mode).reconstruction;
    const auto l = solve(g, {}, Formulation::legacy, mode).reconstruction;
    const double d = std::abs(c.cost - l.cost);
    worst = std::max(worst, d);
    if (c.status == SolveStatus::optimal && l.status == SolveStatus::optimal && d <= 1e-6) ++agree;
  }
  report("formulation equivalence", agree == 50,
         std::to_string(agree) + "/50 agree within 1e-6, largest difference " + fmt(worst, 3) + ", " +
             fmt(elapsed_s(t0), 3) + " s");
}

void speedup() {
  bool structural = true;
  std::string bad;
  for (int e : kCompareLadder) {
    const auto g = random_weight_graph(ladder_vertices(e), e, 1);
    const auto c = model_stats(build_compact(g, Mode::tree));
    const auto l = model_stats(build_legacy(g, Mode::tree));
    const long long expect = static_cast<long long>(g.n_vertices() - 1) * 2 * e;
    if (c.n_bin + c.n_cont > 4 * e || l.n_cont != expect) {
      structural = false;
      bad += " " + std::to_string(e);
    }
  }
  BenchConfig cfg;
  cfg.trials = 5;
  cfg.legacy_trials = 3;
  cfg.cap = 300.0;
  const auto rows = run_bench(cfg, [](const BenchRow& r) {
    std::cout << "  bench " << r.edges << " edges: compact "
              << (r.compact_s ? fmt(*r.compact_s) + " s" : std::string("censored")) << ", legacy "
              << (r.legacy_s ? fmt(*r.legacy_s) + " s" : std::string("censored")) << std::endl;
  });
  bool ordered = true;
  const BenchRow* largest = nullptr;
  for (const auto& r : rows) {
    if (r.edges >= 220) {
      // a censored legacy run is slower than any completed compact run
      const bool ok = r.compact_s && (!r.legacy_s || *r.compact_s <= *r.legacy_s);
      ordered = ordered && ok;
    }
    if (r.speedup()) largest = &r;
  }
  const double sp = largest ? *largest->speedup() : 0.0;
  const bool ok = structural && ordered && largest && sp >= 2.0;
  report("speedup", ok,
         std::string(structural ? "model sizes exact on all 9 sizes; " : "model sizes violated at" + bad + "; ") +
             std::string(ordered ? "compact median <= legacy median at every size >= 220"
                             : "compact slower than legacy at some size >= 220") +
             (largest ? "; largest size both complete " + std::to_string(largest->edges) + " edges, speedup " +
                            fmt(sp, 3) + "x"
                      : "; no size completed by both"));
}

void steiner() {
  int exact = 0;
  std::string bad;
  for (int i = 0; i < 20; ++i) {
    const int nv = 5 + i % 3;
    const int ne = std::min(10, nv + 1 + i % 3);
    const int nt = 2 + i % 2;
    const auto inst = random_steiner_instance(nv, ne, nt, 3000 + static_cast<std::uint64_t>(i));
    const auto reduced = steiner_reduce(inst);
    const double M = steiner_big_m(inst.graph);
    const std::vector<int> terms(inst.terminals.begin(), inst.terminals.end());
    const double stp = oracle::steiner_cost(inst.graph, terms);
    const double got = solve(reduced, {}, Formulation::compact, Mode::tree).reconstruction.cost;
    if (got == stp - M * static_cast<double>(inst.terminals.size())) ++exact;
    else if (bad.empty()) bad = "; instance " + std::to_string(i) + ": " + fmt(got, 17) + " vs " + fmt(stp - M * nt, 17);
  }
  report("steiner cross-check", exact == 20, std::to_string(exact) + "/20 equal to STP optimum - M|T|" + bad);
}

void mstp_dominance() {
  int dominated = 0;
  for (int i = 0; i < 100; ++i) {
    const int ne = 10 + i % 40;
    const auto g = random_weight_graph(std::max(7, ladder_vertices(ne)), ne, 4000 + static_cast<std::uint64_t>(i));
    const Mode mode = i % 2 ? Mode::subgraph : Mode::tree;
    const double opt = solve(g, {}, Formulation::compact, mode).reconstruction.cost;
    if (mst_prune(g).cost >= opt - 1e-9) ++dominated;
  }
  const auto loopy = load_graph(kData + "/loopy.json");
  const double m = mst_prune(loopy).cost;
  const double s = solve(loopy, {}, Formulation::compact, Mode::subgraph).reconstruction.cost;
  report("mstp dominance", dominated == 100 && m > s,
         std::to_string(dominated) + "/100 with mst_prune >= optimum; loopy sample " + fmt(m) + " vs " + fmt(s));
}

void attention() {
  GenSpec spec;
  spec.n_vertices = 8;
  spec.n_edges = 12;
  spec.flip_fraction = 1.0 / 12.0;
  int found = 0, first = 0, top4 = 0;
  std::uint64_t seed = 1;
  for (; found < 50 && seed < 10000; ++seed) {
    spec.seed = seed;
    const auto g = planted_instance(spec);
    EdgeId flipped = -1;
    for (const auto& e : g.edges())
      if ((e.weight < 0) != (e.gt == GtLabel::positive)) flipped = e.id;
    if (flipped < 0 || g.edge(flipped).gt != GtLabel::positive) continue;
    const auto R = solve(g).reconstruction;
    if (R.edges == g.gt_edges()) continue;
    ++found;
    const auto ranked = rank_edges(score_edges(g, Mode::tree, g.weights(), R), RankKey::s, 4);
    if (ranked.front() == flipped) ++first;
    if (std::find(ranked.begin(), ranked.end(), flipped) != ranked.end()) ++top4;
  }
  const bool ok = found == 50 && first >= 40 && top4 >= 48;
  report("attention", ok,
         "flipped edge ranked first in " + std::to_string(first) + "/" + std::to_string(found) + ", top 4 in " +
             std::to_string(top4) + "/" + std::to_string(found) + " (need 80% and 95%)");
}

void active_learning() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentSpec spec;
  spec.trials = 30;
  spec.al_budget = 50;
  const double r = al_experiment(spec, AlStrategy::random).final_mean();
  const double u = al_experiment(spec, AlStrategy::uncertainty).final_mean();
  const double d = al_experiment(spec, AlStrategy::delta_cost).final_mean();
  const bool ok = d >= u && u >= r - 0.01 && d >= r + 0.02;
  report("active learning ordering", ok,
         "final accuracy delta_cost " + fmt(d) + ", uncertainty " + fmt(u) + ", random " + fmt(r) + " (" +
             fmt(elapsed_s(t0), 3) + " s)");
}

/// First x at which the mean curve reaches `target`, or nullopt.
std::optional<int> reach(const TrialCurve& c, double target) {
  for (std::size_t i = 0; i < c.x.size(); ++i)
    if (c.mean[i] >= target) return c.x[i];
  return std::nullopt;
}

void proofreading() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentSpec spec;
  spec.trials = 30;
  spec.proof_budget = 35;
  const auto s = proofread_experiment(spec, ProofCriterion::s_score);
  const auto c = proofread_experiment(spec, ProofCriterion::cost_only);
  const auto r = proofread_experiment(spec, ProofCriterion::random);
  const double target = 0.95 * s.final_mean();
  const auto s_at = reach(s, target);
  // a curve that never reaches the target is charged the whole budget
  const double r_needed = reach(r, target).value_or(spec.proof_budget);
  const bool order = s.final_mean() >= c.final_mean() && c.final_mean() >= r.final_mean();
  const bool fast = s_at && *s_at <= 0.5 * r_needed;
  report("proofreading ordering", order && fast,
         "final topology s_score " + fmt(s.final_mean()) + ", cost_only " + fmt(c.final_mean()) + ", random " +
             fmt(r.final_mean()) + "; s_score reaches 95% of final at " + (s_at ? std::to_string(*s_at) : "never") +
             " verifications, random needs " + fmt(r_needed) + " (" + fmt(elapsed_s(t0), 3) + " s)");
}

void determinism() {
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "gen --seed 7 --out {}/planted.json"},
      {"gen-random", "gen --kind random --vertices 20 --edges 45 --seed 7 --out {}/random.json"},
      {"gen-steiner", "gen --kind steiner --vertices 7 --edges 10 --terminals 3 --seed 7 --out {}/steiner.json"},
      {"solve", "solve --graph " + kData + "/tiny.json --out {}/tiny.json"},
      {"solve-legacy", "solve --graph " + kData + "/loopy.json --mode subgraph --formulation legacy --out {}/loopy.json"},
      {"lp", "lp --graph " + kData + "/tiny.json --formulation legacy --out {}/tiny.lp"},
      {"al", "al --trials 2 --budget 18 --seed 3 --out {}/al"},
      {"proofread", "proofread --trials 2 --seed 3 --out {}/proofread"},
      {"pipeline", "pipeline --trials 2 --budget 14 --seed 3 --out {}/pipeline"},
  };
  TempDir a, b;
  auto expand = [](std::string cmd, const fs::path& dir) {
    for (auto p = cmd.find("{}"); p != std::string::npos; p = cmd.find("{}")) cmd.replace(p, 2, dir.string());
    return cmd;
  };
  int same = 0;
  std::string bad;
  for (const auto& [name, cmd] : commands) {
    std::string out_a, out_b;
    const int ca = run_cli(expand(cmd, a.path), &out_a);
    const int cb = run_cli(expand(cmd, b.path), &out_b);
    if (ca == 0 && cb == 0 && out_a == out_b) ++same;
    else bad += " " + name;
  }
  std::map<std::string, std::uint64_t> ha, hb;
  for (const auto& [dir, h] : {std::pair{&a.path, &ha}, std::pair{&b.path, &hb}})
    for (const auto& f : fs::recursive_directory_iterator(*dir)) {
      const auto rel = fs::relative(f.path(), *dir).string();
      if (!f.is_regular_file() || rel.ends_with(".manifest.json")) continue;
      (*h)[rel] = hash_bytes(slurp(f.path()));
    }
  int differing = 0;
  for (const auto& [rel, h] : ha)
    if (!hb.count(rel) || hb.at(rel) != h) {
      ++differing;
      bad += " " + rel;
    }
  if (ha.size() != hb.size()) ++differing;
  const bool ok = same == static_cast<int>(commands.size()) && differing == 0 && !ha.empty();
  report("determinism", ok,
         std::to_string(same) + "/" + std::to_string(commands.size()) + " commands reproduce stdout, " +
             std::to_string(ha.size() - static_cast<std::size_t>(differing)) + "/" + std::to_string(ha.size()) +
             " output files hash-identical" + (bad.empty() ? "" : "; differing:" + bad));
}

struct Server {
  pid_t pid = -1;
  int port = 0;
};

Server start_server(const fs::path& data_dir) {
  Server s;
  int fds[2];
  if (pipe(fds) != 0) return s;
  s.pid = fork();
  if (s.pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl(kCli.c_str(), kCli.c_str(), "serve", "--listen", "127.0.0.1:0", "--data-dir", data_dir.c_str(),
          static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  std::string line;
  char c;
  while (read(fds[0], &c, 1) == 1 && c != '\n') line += c;
  close(fds[0]);
  if (line.rfind("listening on ", 0) == 0) s.port = std::stoi(line.substr(line.rfind(':') + 1));
  return s;
}

void kill_server(const Server& s) {
  if (s.pid <= 0) return;
  kill(s.pid, SIGKILL);
  waitpid(s.pid, nullptr, 0);
}

nlohmann::json get_json(httplib::Client& cli, const std::string& path) {
  const auto res = cli.Get(path);
  if (!res || res->status != 200) return nullptr;
  return nlohmann::json::parse(res->body);
}

void service_replay() {
  TempDir dir;
  GenSpec spec;
  spec.n_vertices = 16;
  spec.n_edges = 32;
  spec.flip_fraction = 0.15;
  spec.seed = 11;
  const auto g = planted_instance(spec);

  auto first = start_server(dir.path);
  if (first.port <= 0) {
    kill_server(first);
    report("service replay", false, "server did not start");
    return;
  }
  std::string id;
  nlohmann::json before_recon, before_summary, before_queries;
  {
    httplib::Client cli("127.0.0.1", first.port);
    const nlohmann::json body = {{"graph", graph_to_json(g)}, {"mode", "tree"}};
    const auto created = cli.Post("/sessions", body.dump(), "application/json");
    if (created && created->status == 201) id = nlohmann::json::parse(created->body).at("id");
    int labeled = 0;
    for (int round = 0; round < 3 && !id.empty(); ++round) {
      const auto q = get_json(cli, "/sessions/" + id + "/queries?k=2");
      if (q.is_null()) break;
      for (const auto& item : q.at("queries")) {
        const EdgeId e = item.at("edge_id");
        const nlohmann::json lab = {{"edge_id", e}, {"label", g.edge(e).gt == GtLabel::positive ? "pos" : "neg"}};
        const auto r = cli.Post("/sessions/" + id + "/labels", lab.dump(), "application/json");
        if (r && r->status == 200) ++labeled;
      }
    }
    if (!id.empty()) cli.Post("/sessions/" + id + "/undo", "", "application/json");
    if (!id.empty()) {
      before_recon = get_json(cli, "/sessions/" + id + "/reconstruction");
      before_summary = get_json(cli, "/sessions/" + id);
      before_queries = get_json(cli, "/sessions/" + id + "/queries?k=4");
    }
    if (labeled < 4) id.clear();
  }
  kill_server(first);
  if (id.empty()) {
    report("service replay", false, "could not build a session before the kill");
    return;
  }

  auto second = start_server(dir.path);
  nlohmann::json after_recon, after_summary, after_queries;
  if (second.port > 0) {
    httplib::Client cli("127.0.0.1", second.port);
    after_recon = get_json(cli, "/sessions/" + id + "/reconstruction");
    after_summary = get_json(cli, "/sessions/" + id);
    after_queries = get_json(cli, "/sessions/" + id + "/queries?k=4");
  }
  kill_server(second);
  const bool recon = !before_recon.is_null() && before_recon == after_recon;
  const bool hist = !after_summary.is_null() &&
                    before_summary.at("history_length") == after_summary.at("history_length");
  const bool queries = !before_queries.is_null() && before_queries == after_queries;
  report("service replay", recon && hist && queries,
         std::string("reconstruction ") + (recon ? "equal" : "differs") + ", history length " +
             (hist ? "equal (" + before_summary.at("history_length").dump() + ")" : "differs") + ", queries " +
             (queries ? "equal" : "differ"));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> checks = {
      {"oracle equivalence", oracle_equivalence},
      {"formulation equivalence", formulation_equivalence},
      {"speedup", speedup},
      {"steiner cross-check", steiner},
      {"mstp dominance", mstp_dominance},
      {"attention", attention},
      {"active learning ordering", active_learning},
      {"proofreading ordering", proofreading},
      {"determinism", determinism},
      {"service replay", service_replay},
  };
  for (const auto& [name, f] : checks) {
    try {
      f();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
