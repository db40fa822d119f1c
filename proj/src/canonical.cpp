#include "canonical.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <utility>

namespace assemblage::detail {

namespace {

struct Canonicalizer {
  const ColoredGraph &g;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbor, edge color)
  std::string best_code;
  std::vector<int> best_order;
  bool have_best = false;

  explicit Canonicalizer(const ColoredGraph &graph) : g(graph), adj(graph.n) {
    for (const auto &e : g.edges) {
      adj[e.a].emplace_back(e.b, e.color);
      adj[e.b].emplace_back(e.a, e.color);
    }
  }

  // Refines ranks to a fixed point.  Rank values are positions of sorted
  // signatures, so they are invariant under vertex relabeling.  Classes only
  // ever split (the signature embeds the old rank), and once the partition is
  // stable the values reproduce themselves exactly, so value equality is a
  // valid termination test.
  std::vector<int> refine(std::vector<int> ranks) const {
    for (;;) {
      std::vector<std::pair<std::vector<int>, int>> sigs(g.n);
      for (int v = 0; v < g.n; ++v) {
        std::vector<int> sig{ranks[v]};
        std::vector<std::pair<int, int>> nbr;
        nbr.reserve(adj[v].size());
        for (auto [u, ec] : adj[v]) nbr.emplace_back(ec, ranks[u]);
        std::sort(nbr.begin(), nbr.end());
        for (auto [ec, r] : nbr) {
          sig.push_back(ec);
          sig.push_back(r);
        }
        sigs[v] = {std::move(sig), v};
      }
      std::map<std::vector<int>, int> ids;
      for (auto &[sig, v] : sigs) ids.try_emplace(sig, 0);
      int next = 0;
      for (auto &[sig, id] : ids) id = next++;
      std::vector<int> updated(g.n);
      for (auto &[sig, v] : sigs) updated[v] = ids[sig];
      if (updated == ranks) return ranks;
      ranks = std::move(updated);
    }
  }

  std::string emit(const std::vector<int> &order) const {
    // order[v] = canonical position.  Code: vertex colors by position, then
    // sorted (min pos, max pos, edge color) triples; fixed-width encoding so
    // string comparison equals tuple comparison.
    std::vector<int> color_at(g.n);
    for (int v = 0; v < g.n; ++v) color_at[order[v]] = g.color[v];
    std::vector<std::array<int, 3>> edges;
    edges.reserve(g.edges.size());
    for (const auto &e : g.edges) {
      int pa = order[e.a], pb = order[e.b];
      edges.push_back({std::min(pa, pb), std::max(pa, pb), e.color});
    }
    std::sort(edges.begin(), edges.end());
    std::string code;
    code.reserve(8 + (g.n + 3 * edges.size()) * 4);
    auto put = [&code](uint32_t x) {
      code.push_back(static_cast<char>((x >> 24) & 0xff));
      code.push_back(static_cast<char>((x >> 16) & 0xff));
      code.push_back(static_cast<char>((x >> 8) & 0xff));
      code.push_back(static_cast<char>(x & 0xff));
    };
    put(static_cast<uint32_t>(g.n));
    put(static_cast<uint32_t>(edges.size()));
    for (int p = 0; p < g.n; ++p) put(static_cast<uint32_t>(color_at[p]));
    for (const auto &e : edges)
      for (int x : e) put(static_cast<uint32_t>(x));
    return code;
  }

  void search(std::vector<int> ranks) {
    ranks = refine(std::move(ranks));

    // First non-singleton class by rank.
    std::vector<int> count(g.n + 1, 0);
    for (int r : ranks) ++count[r];
    int target = -1;
    for (int v = 0; v < g.n; ++v) {
      if (count[ranks[v]] > 1 && (target == -1 || ranks[v] < ranks[target])) target = v;
    }

    if (target == -1) {
      std::string code = emit(ranks);
      if (!have_best || code < best_code) {
        best_code = std::move(code);
        best_order = ranks;
        have_best = true;
      }
      return;
    }

    int target_rank = ranks[target];
    for (int v = 0; v < g.n; ++v) {
      if (ranks[v] != target_rank) continue;
      std::vector<int> next(g.n);
      for (int u = 0; u < g.n; ++u) next[u] = ranks[u] * 2 + 1;
      next[v] = target_rank * 2;  // individualize v ahead of its class
      search(std::move(next));
    }
  }

  void run() {
    std::vector<int> init(g.color);
    // Normalize initial colors to dense ranks.
    std::map<int, int> ids;
    for (int c : init) ids.try_emplace(c, 0);
    int next = 0;
    for (auto &[c, id] : ids) id = next++;
    for (auto &c : init) c = ids[c];
    search(std::move(init));
  }
};

}  // namespace

std::string canonical_code(const ColoredGraph &g) {
  if (g.n == 0) return std::string();
  Canonicalizer c(g);
  c.run();
  return c.best_code;
}

std::vector<int> canonical_order(const ColoredGraph &g) {
  if (g.n == 0) return {};
  Canonicalizer c(g);
  c.run();
  return c.best_order;
}

}  // namespace assemblage::detail
