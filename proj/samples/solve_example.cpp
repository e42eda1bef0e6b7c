// Solves a bundled graph, ranks edges for proofreading and prints the top queries.
//
//   solve_example [graph.json]

#include <iostream>

#include "delin/delin.hpp"

int main(int argc, char** argv) {
  using namespace delin;
  const std::string path = argc > 1 ? argv[1] : DELIN_DATA "/tiny.json";
  try {
    const Graph g = load_graph(path);
    const auto r = solve(g);
    std::cout << "cost " << r.reconstruction.cost << " (" << to_string(r.reconstruction.status) << "), "
              << r.reconstruction.edges.size() << " edges\n";

    const auto W = g.weights();
    const auto scores = score_edges(g, g.mode(), W, r.reconstruction);
    std::cout << "edges worth checking first:";
    for (EdgeId e : rank_edges(scores, RankKey::s, 4)) std::cout << ' ' << e;
    std::cout << '\n';
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  }
}
