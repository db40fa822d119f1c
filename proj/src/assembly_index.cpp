#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "assemblage/complexity.hpp"
#include "assemblage/elements.hpp"
#include "assemblage/errors.hpp"
#include "assemblage/molgraph.hpp"
#include "canonical.hpp"

namespace assemblage {

namespace {

constexpr int kMaxSearchBonds = 128;

int ceil_log2(std::uint64_t n) {
  int k = 0;
  std::uint64_t v = 1;
  while (v < n) {
    v <<= 1;
    ++k;
  }
  return k;
}

// ---------------------------------------------------------------------------
// Edge subsets of the target graph (up to 128 bonds).

struct EdgeSet {
  std::uint64_t w0 = 0, w1 = 0;

  void set(int i) { (i < 64 ? w0 : w1) |= (std::uint64_t{1} << (i & 63)); }
  void reset(int i) { (i < 64 ? w0 : w1) &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const { return ((i < 64 ? w0 : w1) >> (i & 63)) & 1; }
  bool empty() const { return w0 == 0 && w1 == 0; }
  int count() const { return __builtin_popcountll(w0) + __builtin_popcountll(w1); }

  EdgeSet operator|(const EdgeSet &o) const { return {w0 | o.w0, w1 | o.w1}; }
  EdgeSet operator&(const EdgeSet &o) const { return {w0 & o.w0, w1 & o.w1}; }
  EdgeSet minus(const EdgeSet &o) const { return {w0 & ~o.w0, w1 & ~o.w1}; }
  bool intersects(const EdgeSet &o) const { return (w0 & o.w0) || (w1 & o.w1); }
  bool contains(const EdgeSet &o) const { return (o.w0 & ~w0) == 0 && (o.w1 & ~w1) == 0; }
  bool operator==(const EdgeSet &o) const { return w0 == o.w0 && w1 == o.w1; }
  bool operator<(const EdgeSet &o) const { return w1 != o.w1 ? w1 < o.w1 : w0 < o.w0; }

  int lowest() const {
    if (w0) return __builtin_ctzll(w0);
    if (w1) return 64 + __builtin_ctzll(w1);
    return -1;
  }

  template <typename F>
  void for_each(F f) const {
    std::uint64_t v = w0;
    while (v) {
      f(__builtin_ctzll(v));
      v &= v - 1;
    }
    v = w1;
    while (v) {
      f(64 + __builtin_ctzll(v));
      v &= v - 1;
    }
  }
};

struct EdgeSetHash {
  size_t operator()(const EdgeSet &s) const {
    std::uint64_t h = s.w0 * 0x9e3779b97f4a7c15ull;
    h ^= (s.w1 + 0x165667b19e3779f9ull) + (h << 6) + (h >> 2);
    return static_cast<size_t>(h);
  }
};

struct EdgeSetPairHash {
  size_t operator()(const std::pair<EdgeSet, EdgeSet> &p) const {
    EdgeSetHash h;
    return h(p.first) * 1000003u ^ h(p.second);
  }
};

struct IntVecHash {
  size_t operator()(const std::vector<int> &v) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int x : v) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
      h *= 0x100000001b3ull;
    }
    return static_cast<size_t>(h);
  }
};

// One duplicate-factoring move: keep `a`, delete the isomorphic disjoint `b`.
struct MoveRec {
  EdgeSet piece1, piece2;  // containing pieces; equal for a same-piece move
  EdgeSet a, b;
  int size = 0;
};

// ---------------------------------------------------------------------------

struct Search {
  const MolecularGraph &mol;
  int nb = 0;
  std::vector<std::array<int, 2>> ends;
  std::vector<int> bond_type;
  std::vector<int> bond_order;
  std::vector<int> elem;
  std::vector<EdgeSet> bond_adj;
  std::vector<std::vector<std::pair<int, int>>> atom_adj;  // atom -> (bond, other)

  std::unordered_map<EdgeSet, int, EdgeSetHash> shape_of_set;
  std::map<std::string, int> shape_by_code;

  struct Entry {
    int lo = 0;        // achieved additional savings from this state
    bool exact = false;  // lo is the exact optimum for the state
  };
  std::unordered_map<std::vector<int>, Entry, IntVecHash> memo;

  std::uint64_t node_limit = ~std::uint64_t{0};
  std::chrono::steady_clock::time_point deadline;
  bool has_deadline = false;
  std::uint64_t nodes = 0;
  bool out_of_budget = false;
  int frontier_lb;  // min potential among budget-cut states

  int glb = 0;      // global lower bound ceil(log2 nb)
  int best_ma;      // incumbent
  int cap = 0;      // pair size cap for the current pass; 0 = uncapped
  bool capped = false;

  std::vector<MoveRec> move_stack;
  std::vector<MoveRec> best_moves;
  std::vector<EdgeSet> best_tail_pieces;
  int best_tail_savings = 0;

  explicit Search(const MolecularGraph &g) : mol(g) {
    nb = g.bond_count();
    best_ma = nb - 1;
    frontier_lb = nb;
    ends.resize(nb);
    bond_type.resize(nb);
    bond_order.resize(nb);
    bond_adj.resize(nb);
    elem.resize(g.atom_count());
    atom_adj.resize(g.atom_count());
    for (int i = 0; i < g.atom_count(); ++i) elem[i] = element_index(g.atoms()[i].element);
    std::map<std::array<int, 3>, int> type_ids;
    for (int i = 0; i < nb; ++i) {
      const Bond &b = g.bonds()[i];
      ends[i] = {b.a, b.b};
      bond_order[i] = b.order;
      std::array<int, 3> key = {std::min(elem[b.a], elem[b.b]), std::max(elem[b.a], elem[b.b]),
                                b.order};
      auto [it, ins] = type_ids.try_emplace(key, static_cast<int>(type_ids.size()));
      bond_type[i] = it->second;
      atom_adj[b.a].emplace_back(i, b.b);
      atom_adj[b.b].emplace_back(i, b.a);
    }
    for (int i = 0; i < nb; ++i)
      for (int v : ends[i])
        for (auto [bond, other] : atom_adj[v])
          if (bond != i) bond_adj[i].set(bond);
  }

  bool budget_spent() {
    if (out_of_budget) return true;
    if (nodes > node_limit) {
      out_of_budget = true;
      return true;
    }
    if (has_deadline && (nodes & 0x3ff) == 0 && std::chrono::steady_clock::now() >= deadline) {
      out_of_budget = true;
      return true;
    }
    return false;
  }

  // ---- shapes --------------------------------------------------------------

  int shape_id(const EdgeSet &piece) {
    auto it = shape_of_set.find(piece);
    if (it != shape_of_set.end()) return it->second;
    std::vector<int> verts;
    piece.for_each([&](int b) {
      verts.push_back(ends[b][0]);
      verts.push_back(ends[b][1]);
    });
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    std::vector<int> pos(mol.atom_count(), -1);
    for (size_t i = 0; i < verts.size(); ++i) pos[verts[i]] = static_cast<int>(i);
    detail::ColoredGraph cg;
    cg.n = static_cast<int>(verts.size());
    cg.color.resize(cg.n);
    for (size_t i = 0; i < verts.size(); ++i) cg.color[i] = elem[verts[i]];
    piece.for_each(
        [&](int b) { cg.edges.push_back({pos[ends[b][0]], pos[ends[b][1]], bond_order[b]}); });
    std::string code = detail::canonical_code(cg);
    auto [cit, inserted] = shape_by_code.try_emplace(code, static_cast<int>(shape_by_code.size()));
    shape_of_set.emplace(piece, cit->second);
    return cit->second;
  }

  std::vector<int> state_key(const std::vector<EdgeSet> &pieces) {
    std::vector<int> key;
    key.reserve(pieces.size());
    for (const auto &p : pieces) key.push_back(shape_id(p));
    std::sort(key.begin(), key.end());
    return key;
  }

  // ---- state helpers -------------------------------------------------------

  // Connected components with >= 2 edges; single bonds are free building
  // blocks and leave the state.
  void components_into(const EdgeSet &set, std::vector<EdgeSet> &out) const {
    EdgeSet left = set;
    while (!left.empty()) {
      int seedbit = left.lowest();
      EdgeSet comp;
      comp.set(seedbit);
      left.reset(seedbit);
      std::vector<int> stack{seedbit};
      while (!stack.empty()) {
        int b = stack.back();
        stack.pop_back();
        EdgeSet frontier = bond_adj[b] & left;
        frontier.for_each([&](int f) {
          comp.set(f);
          left.reset(f);
          stack.push_back(f);
        });
      }
      if (comp.count() >= 2) out.push_back(comp);
    }
  }

  std::vector<EdgeSet> apply_move(const std::vector<EdgeSet> &pieces, const MoveRec &m) const {
    std::vector<EdgeSet> next;
    next.reserve(pieces.size() + 2);
    for (const auto &p : pieces)
      if (!(p == m.piece1) && !(p == m.piece2)) next.push_back(p);
    next.push_back(m.a);
    if (m.piece1 == m.piece2) {
      components_into(m.piece1.minus(m.a | m.b), next);
    } else {
      components_into(m.piece1.minus(m.a), next);
      components_into(m.piece2.minus(m.b), next);
    }
    return next;
  }

  int state_v(const std::vector<EdgeSet> &pieces) const {
    int v = 0;
    for (const auto &p : pieces) v += p.count() - 1;
    return v;
  }

  int state_lbj(const std::vector<EdgeSet> &pieces, const std::vector<int> &key) const {
    if (pieces.empty()) return 0;
    int emax = 0;
    for (const auto &p : pieces) emax = std::max(emax, p.count());
    int distinct = 1;
    for (size_t i = 1; i < key.size(); ++i)
      if (key[i] != key[i - 1]) ++distinct;
    return std::max(ceil_log2(static_cast<std::uint64_t>(emax)), distinct);
  }

  // ---- duplicate-pair enumeration -------------------------------------------

  struct Instance {
    EdgeSet b;
    int piece;
    std::vector<int16_t> phi;  // atom -> image atom, -1 unmapped
  };

  // Mirror copies B may grow into overlap with A temporarily?  No: A only
  // grows, so an instance overlapping A can never become disjoint again and
  // is dropped immediately.
  void enumerate_moves(const std::vector<EdgeSet> &pieces, int max_useful, std::vector<MoveRec> &out) {
    std::unordered_set<std::pair<EdgeSet, EdgeSet>, EdgeSetPairHash> seen_pairs;
    const int natoms = mol.atom_count();
    for (size_t pi = 0; pi < pieces.size(); ++pi) {
      const EdgeSet &piece = pieces[pi];
      std::vector<int> edges;
      piece.for_each([&](int e) { edges.push_back(e); });
      for (int seed : edges) {
        std::vector<Instance> instances;
        for (size_t pj = 0; pj < pieces.size(); ++pj) {
          pieces[pj].for_each([&](int b) {
            if (b <= seed || bond_type[b] != bond_type[seed]) return;
            for (int flip = 0; flip < 2; ++flip) {
              int u0 = ends[seed][0], u1 = ends[seed][1];
              int v0 = ends[b][flip], v1 = ends[b][1 - flip];
              if (elem[u0] != elem[v0] || elem[u1] != elem[v1]) continue;
              Instance ins;
              ins.b.set(b);
              ins.piece = static_cast<int>(pj);
              ins.phi.assign(natoms, -1);
              ins.phi[u0] = static_cast<int16_t>(v0);
              ins.phi[u1] = static_cast<int16_t>(v1);
              instances.push_back(std::move(ins));
            }
          });
        }
        if (instances.empty()) continue;
        EdgeSet a;
        a.set(seed);
        std::vector<int> ext;
        EdgeSet adj = bond_adj[seed] & piece;
        EdgeSet avoid = adj;
        avoid.set(seed);
        adj.for_each([&](int e) {
          if (e > seed) ext.push_back(e);
        });
        grow(pieces, static_cast<int>(pi), seed, a, ext, avoid, instances, max_useful, out,
             seen_pairs);
        if (out_of_budget) return;
      }
    }
  }

  // Greedy mode keeps only the best pair instead of collecting everything.
  bool greedy_mode = false;
  std::uint64_t greedy_quota = 0;
  MoveRec greedy_best;

  void grow(const std::vector<EdgeSet> &pieces, int pi, int seed, const EdgeSet &a,
            const std::vector<int> &ext, const EdgeSet &avoid, const std::vector<Instance> &insts,
            int max_useful, std::vector<MoveRec> &out,
            std::unordered_set<std::pair<EdgeSet, EdgeSet>, EdgeSetPairHash> &seen_pairs) {
    ++nodes;
    if (greedy_mode) {
      if (greedy_quota == 0) return;
      --greedy_quota;
    } else if (budget_spent()) {
      return;
    }
    const int asize = a.count();
    if (asize >= 2) {
      if (greedy_mode) {
        if (asize > greedy_best.size)
          greedy_best = {pieces[pi], pieces[insts.front().piece], a, insts.front().b, asize};
      } else {
        for (const auto &ins : insts) {
          auto pr = a < ins.b ? std::make_pair(a, ins.b) : std::make_pair(ins.b, a);
          if (!seen_pairs.insert(pr).second) continue;
          out.push_back({pieces[pi], pieces[ins.piece], a, ins.b, asize});
        }
      }
    }
    if (cap > 0 && asize >= cap) {
      if (!ext.empty()) growth_clipped = true;
      return;
    }
    if (asize >= max_useful) {
      if (!ext.empty()) growth_clipped = true;
      return;
    }

    for (size_t i = 0; i < ext.size(); ++i) {
      int e = ext[i];
      std::vector<Instance> next;
      extend_instances(pieces, insts, e, seed, a, next);
      if (next.empty()) continue;
      EdgeSet na = a;
      na.set(e);
      std::vector<int> next_ext(ext.begin() + static_cast<long>(i) + 1, ext.end());
      EdgeSet navoid = avoid;
      EdgeSet fresh = (bond_adj[e] & pieces[pi]).minus(avoid);
      fresh.for_each([&](int f) {
        if (f > seed) next_ext.push_back(f);
        navoid.set(f);
      });
      std::sort(next_ext.begin(), next_ext.end());
      grow(pieces, pi, seed, na, next_ext, navoid, next, max_useful, out, seen_pairs);
      if (greedy_mode ? greedy_quota == 0 : out_of_budget) return;
    }
  }

  // Largest duplicate pair reachable within a node quota; for the greedy dive.
  MoveRec find_large_pair(const std::vector<EdgeSet> &pieces, std::uint64_t quota) {
    greedy_mode = true;
    greedy_quota = quota;
    greedy_best = MoveRec{};
    std::vector<MoveRec> sink;
    enumerate_moves(pieces, nb, sink);
    greedy_mode = false;
    return greedy_best;
  }

  // Repeated largest-first factoring to establish a strong incumbent before
  // exhaustive passes.
  void greedy_dive(const std::vector<EdgeSet> &root) {
    std::vector<EdgeSet> pieces = root;
    std::vector<MoveRec> dive;
    int savings = 0;
    while (true) {
      MoveRec m = find_large_pair(pieces, 400000);
      if (m.size < 2) break;
      dive.push_back(m);
      pieces = apply_move(pieces, m);
      savings += m.size - 1;
    }
    if (nb - 1 - savings < best_ma) {
      best_ma = nb - 1 - savings;
      best_moves = dive;
      best_tail_pieces = pieces;
      best_tail_savings = 0;
    }
  }

  void extend_instances(const std::vector<EdgeSet> &pieces, const std::vector<Instance> &insts,
                        int e, int seed, const EdgeSet &a, std::vector<Instance> &out) const {
    const int u = ends[e][0], v = ends[e][1];
    EdgeSet na = a;
    na.set(e);
    for (const auto &ins : insts) {
      if (ins.b.test(e)) continue;  // extending A into this mirror's territory
      const int mu = ins.phi[u], mv = ins.phi[v];
      if (mu >= 0 && mv >= 0) {
        // Closing edge: the unique image bond must exist, match and be free.
        for (auto [bond, other] : atom_adj[mu]) {
          if (other != mv) continue;
          if (bond > seed && bond_order[bond] == bond_order[e] && !ins.b.test(bond) &&
              pieces[ins.piece].test(bond) && !na.test(bond)) {
            Instance ni = ins;
            ni.b.set(bond);
            if (!ni.b.intersects(na)) out.push_back(std::move(ni));
          }
          break;
        }
      } else if (mu >= 0 || mv >= 0) {
        const int anchor = mu >= 0 ? mu : mv;
        const int fresh_src = mu >= 0 ? v : u;
        for (auto [bond, other] : atom_adj[anchor]) {
          if (bond <= seed || ins.b.test(bond) || na.test(bond)) continue;
          if (bond_order[bond] != bond_order[e]) continue;
          if (elem[other] != elem[fresh_src]) continue;
          if (!pieces[ins.piece].test(bond)) continue;
          bool used = false;
          ins.b.for_each([&](int bb) {
            if (ends[bb][0] == other || ends[bb][1] == other) used = true;
          });
          if (used) continue;
          Instance ni = ins;
          ni.b.set(bond);
          ni.phi[fresh_src] = static_cast<int16_t>(other);
          out.push_back(std::move(ni));
        }
      }
    }
  }

  // ---- main recursion --------------------------------------------------------

  int potential(int savings, int v, int lbj) const { return nb - 1 - savings - (v - lbj); }

  struct SR {
    int lo = 0;
    bool exact = false;
  };

  bool growth_clipped = false;  // a grow() path stopped at max_useful or cap

  // Best additional savings found from this state; `exact` when no cut below
  // could be hiding better savings.
  SR search_state(const std::vector<EdgeSet> &pieces, int savings) {
    ++nodes;
    std::vector<int> key = state_key(pieces);
    const int v = state_v(pieces);
    const int lbj = state_lbj(pieces, key);
    const int static_up = std::max(0, v - lbj);

    auto mit = memo.find(key);
    int known_lo = 0;
    if (mit != memo.end()) {
      if (mit->second.exact) return {mit->second.lo, true};
      known_lo = mit->second.lo;
    }

    // Bound cut: nothing through here can beat the incumbent.
    if (potential(savings, v, lbj) >= best_ma) return {known_lo, false};

    if (budget_spent()) {
      frontier_lb = std::min(frontier_lb, potential(savings, v, lbj));
      return {known_lo, false};
    }

    // Any move of size h yields a child whose potential is at least
    // nb-1 - savings - v + 1 + ceil(log2 h), so sizes beyond this limit
    // cannot produce an improvement.
    const int pb = nb - 1 - savings - v;
    int max_useful = nb;
    {
      const int k = best_ma - pb - 1;  // require ceil(log2 h) < k
      if (k <= 1)
        max_useful = 1;
      else if (k - 1 < 30)
        max_useful = static_cast<int>(
            std::min<std::int64_t>(nb, std::int64_t{1} << (k - 1)));
    }

    const bool clip_before = growth_clipped;
    growth_clipped = false;
    std::vector<MoveRec> moves;
    enumerate_moves(pieces, max_useful, moves);
    bool clipped_here = growth_clipped;
    growth_clipped = clip_before;
    if (out_of_budget) {
      frontier_lb = std::min(frontier_lb, potential(savings, v, lbj));
      return {known_lo, false};
    }

    std::stable_sort(moves.begin(), moves.end(),
                     [](const MoveRec &x, const MoveRec &y) { return x.size > y.size; });

    struct U64VecHash {
      size_t operator()(const std::vector<std::uint64_t> &v) const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (std::uint64_t x : v) {
          h ^= x;
          h *= 0x100000001b3ull;
        }
        return static_cast<size_t>(h);
      }
    };
    std::unordered_set<std::vector<std::uint64_t>, U64VecHash> child_seen;
    int lo = known_lo;
    bool subtree_exact = !clipped_here;

    for (const auto &m : moves) {
      auto child = apply_move(pieces, m);
      std::sort(child.begin(), child.end());
      {
        std::vector<std::uint64_t> flat;
        flat.reserve(child.size() * 2 + 1);
        for (const auto &p : child) {
          flat.push_back(p.w0);
          flat.push_back(p.w1);
        }
        flat.push_back(static_cast<std::uint64_t>(m.size));
        if (!child_seen.insert(std::move(flat)).second) continue;
      }

      const int child_savings = savings + m.size - 1;

      // Weak bound first: avoids canonicalizing children that cannot matter.
      {
        int cv = 0, cemax = 0;
        for (const auto &p : child) {
          int c = p.count();
          cv += c - 1;
          cemax = std::max(cemax, c);
        }
        int weak_lbj = ceil_log2(static_cast<std::uint64_t>(std::max(cemax, 1)));
        if (nb - 1 - child_savings - (cv - weak_lbj) >= best_ma) {
          subtree_exact = false;
          continue;
        }
      }

      auto ckey = state_key(child);
      auto cmit = memo.find(ckey);
      if (cmit != memo.end() && cmit->second.exact) {
        int total = m.size - 1 + cmit->second.lo;
        if (total > lo) lo = total;
        if (nb - 1 - savings - total < best_ma) {
          best_ma = nb - 1 - savings - total;
          move_stack.push_back(m);
          best_moves = move_stack;
          move_stack.pop_back();
          best_tail_pieces = child;
          best_tail_savings = cmit->second.lo;
        }
        continue;
      }

      const int cv = state_v(child);
      const int clbj = state_lbj(child, ckey);
      if (potential(child_savings, cv, clbj) >= best_ma) {
        subtree_exact = false;  // cut protects the incumbent, not this value
        continue;
      }

      move_stack.push_back(m);
      SR cr = search_state(child, child_savings);
      int total = m.size - 1 + cr.lo;
      if (total > lo) lo = total;
      if (nb - 1 - savings - total < best_ma) {
        best_ma = nb - 1 - savings - total;
        best_moves = move_stack;
        best_tail_pieces = child;
        best_tail_savings = cr.lo;
      }
      move_stack.pop_back();
      if (!cr.exact) subtree_exact = false;
      if (out_of_budget) {
        subtree_exact = false;
        frontier_lb = std::min(frontier_lb, potential(savings, v, lbj));
        break;
      }
    }

    Entry &e = memo[key];
    e.lo = std::max(e.lo, lo);
    if (e.lo >= static_up) e.exact = true;  // reached the admissible ceiling
    if (subtree_exact && !capped) e.exact = true;
    return {e.lo, e.exact};
  }
};

}  // namespace

// ---------------------------------------------------------------------------

std::pair<int, int> assembly_bounds(const MolecularGraph &g) {
  int nb = g.bond_count();
  if (nb < 1) throw EmptyGraph("assembly bounds require at least one bond");
  return {ceil_log2(static_cast<std::uint64_t>(nb)), nb - 1};
}

double ensemble_assembly(const EnsembleObservation &obs) {
  const double nt = static_cast<double>(obs.total_count());
  double a = 0.0;
  for (const auto &o : obs.objects)
    if (o.copy_number > 1)
      a += std::exp(static_cast<double>(o.assembly_index)) *
           (static_cast<double>(o.copy_number) / nt);
  return a;
}

namespace {

// ---------------------------------------------------------------------------
// Witness construction: expand the recorded factoring moves into join steps.

struct WitnessBuilder {
  Search &s;
  std::vector<JoinStep> steps;
  std::map<EdgeSet, int> object_step;  // built object (by placement) -> step
  const std::vector<MoveRec> &moves;
  std::vector<char> consumed;  // move used as consumer already

  WitnessBuilder(Search &search, const std::vector<MoveRec> &mv) : s(search), moves(mv) {}

  static std::vector<int> to_edge_list(const EdgeSet &set) {
    std::vector<int> v;
    set.for_each([&](int e) { v.push_back(e); });
    return v;
  }

  struct Ref {
    int step = -1;            // -1: single bond
    std::vector<int> edges;   // placement in the target graph
    EdgeSet set;
  };

  bool shares_vertex(const EdgeSet &x, const EdgeSet &y) const {
    bool hit = false;
    x.for_each([&](int e) {
      if (hit) return;
      int a = s.ends[e][0], b = s.ends[e][1];
      y.for_each([&](int f) {
        if (s.ends[f][0] == a || s.ends[f][1] == a || s.ends[f][0] == b || s.ends[f][1] == b)
          hit = true;
      });
    });
    return hit;
  }

  Ref join_parts(const EdgeSet &whole, std::vector<Ref> parts) {
    // Merge parts in shared-vertex order so every intermediate is connected.
    Ref cur = parts.front();
    std::vector<char> used(parts.size(), 0);
    used[0] = 1;
    for (size_t done = 1; done < parts.size(); ++done) {
      size_t pick = parts.size();
      for (size_t i = 1; i < parts.size(); ++i) {
        if (!used[i] && shares_vertex(cur.set, parts[i].set)) {
          pick = i;
          break;
        }
      }
      if (pick == parts.size()) return {};  // should not happen: whole is connected
      JoinStep st;
      st.lhs_ref = cur.step;
      st.lhs_edges = cur.edges;
      st.rhs_ref = parts[pick].step;
      st.rhs_edges = parts[pick].edges;
      EdgeSet u = cur.set | parts[pick].set;
      st.result_edges = to_edge_list(u);
      steps.push_back(std::move(st));
      cur.step = static_cast<int>(steps.size()) - 1;
      cur.set = u;
      cur.edges = steps.back().result_edges;
      used[pick] = 1;
    }
    (void)whole;
    return cur;
  }

  Ref build_bond_by_bond(const EdgeSet &x) {
    std::vector<Ref> parts;
    x.for_each([&](int e) {
      Ref r;
      r.step = -1;
      r.edges = {e};
      r.set.set(e);
      parts.push_back(std::move(r));
    });
    if (parts.size() == 1) return parts.front();
    return join_parts(x, std::move(parts));
  }

  Ref build_object(const EdgeSet &x) {
    if (x.count() == 1) {
      Ref r;
      r.step = -1;
      r.edges = to_edge_list(x);
      r.set = x;
      return r;
    }
    auto it = object_step.find(x);
    if (it != object_step.end()) {
      Ref r;
      r.step = it->second;
      r.edges = to_edge_list(x);
      r.set = x;
      return r;
    }

    // Find the move that consumes this piece.
    for (size_t mi = 0; mi < moves.size(); ++mi) {
      const MoveRec &m = moves[mi];
      const bool same = m.piece1 == m.piece2;
      if (m.piece1 == x && !(m.a == x)) {
        std::vector<Ref> parts;
        parts.push_back(build_object(m.a));
        if (same) {
          Ref bcopy = reuse_copy(m);
          parts.push_back(std::move(bcopy));
          append_components(x.minus(m.a | m.b), parts);
        } else {
          append_components(x.minus(m.a), parts);
        }
        Ref r = join_parts(x, std::move(parts));
        object_step[x] = r.step;
        return r;
      }
      if (!same && m.piece2 == x) {
        std::vector<Ref> parts;
        parts.push_back(reuse_copy(m));
        append_components(x.minus(m.b), parts);
        if (parts.size() == 1) {
          object_step[x] = parts.front().step;
          return parts.front();
        }
        Ref r = join_parts(x, std::move(parts));
        object_step[x] = r.step;
        return r;
      }
    }

    // Terminal piece: assembled bond by bond.
    Ref r = build_bond_by_bond(x);
    object_step[x] = r.step;
    return r;
  }

  Ref reuse_copy(const MoveRec &m) {
    Ref a = build_object(m.a);
    Ref r;
    r.step = a.step;  // same pool object, new placement
    r.edges = to_edge_list(m.b);
    r.set = m.b;
    return r;
  }

  void append_components(const EdgeSet &rest, std::vector<Ref> &parts) {
    EdgeSet left = rest;
    while (!left.empty()) {
      int seed = left.lowest();
      EdgeSet comp;
      comp.set(seed);
      left.reset(seed);
      std::vector<int> stack{seed};
      while (!stack.empty()) {
        int b = stack.back();
        stack.pop_back();
        EdgeSet fr = s.bond_adj[b] & left;
        fr.for_each([&](int f) {
          comp.set(f);
          left.reset(f);
          stack.push_back(f);
        });
      }
      parts.push_back(build_object(comp));
    }
  }
};

// Extends the recorded incumbent prefix with a memo-guided descent, then
// expands the full move list into join steps.
std::optional<std::vector<JoinStep>> reconstruct_witness(Search &s) {
  std::vector<MoveRec> full = s.best_moves;
  std::vector<EdgeSet> pieces = s.best_tail_pieces;
  int need = s.best_tail_savings;

  s.node_limit = ~std::uint64_t{0};
  s.has_deadline = false;
  s.cap = 0;
  s.capped = true;  // protect memo exactness flags during descent

  while (need > 0) {
    std::vector<MoveRec> moves;
    s.growth_clipped = false;
    s.enumerate_moves(pieces, s.nb, moves);
    std::stable_sort(moves.begin(), moves.end(),
                     [](const MoveRec &x, const MoveRec &y) { return x.size > y.size; });
    bool advanced = false;
    for (const auto &m : moves) {
      if (m.size - 1 > need) continue;
      auto child = s.apply_move(pieces, m);
      auto ckey = s.state_key(child);
      auto it = s.memo.find(ckey);
      int child_lo = it != s.memo.end() ? it->second.lo : 0;
      if (m.size - 1 + child_lo >= need) {
        full.push_back(m);
        pieces = child;
        need -= m.size - 1;
        need = std::min(need, child_lo);
        advanced = true;
        break;
      }
    }
    if (!advanced) return std::nullopt;
  }

  WitnessBuilder wb(s, full);
  EdgeSet all;
  for (int i = 0; i < s.nb; ++i) all.set(i);
  auto root = wb.build_object(all);
  if (root.set == all) return wb.steps;
  return std::nullopt;
}

}  // namespace

AssemblyResult assembly_index(const MolecularGraph &g, const AssemblyBudget &budget) {
  const auto t0 = std::chrono::steady_clock::now();
  const int nb = g.bond_count();
  if (nb < 1) throw EmptyGraph("assembly index requires at least one bond");

  AssemblyResult res;
  auto [glb, gub] = assembly_bounds(g);
  res.lower = glb;
  res.upper = gub;

  if (nb > kMaxSearchBonds) {
    res.exact = res.lower == res.upper;
    res.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - t0);
    return res;
  }

  Search s(g);
  s.glb = glb;
  if (budget.node_limit) s.node_limit = *budget.node_limit;
  if (budget.time_limit) {
    s.deadline = t0 + *budget.time_limit;
    s.has_deadline = true;
  }

  std::vector<EdgeSet> root;
  if (nb >= 2) {
    EdgeSet all;
    for (int i = 0; i < nb; ++i) all.set(i);
    root.push_back(all);
  }
  s.best_tail_pieces = root;

  if (!root.empty()) s.greedy_dive(root);

  bool complete = s.best_ma <= glb;
  if (!complete) {
    const int caps[] = {4, 0};
    for (int c : caps) {
      s.cap = c;
      s.capped = c != 0;
      if (!root.empty()) s.search_state(root, 0);
      if (s.out_of_budget) break;
      if (s.best_ma <= glb) {
        complete = true;
        break;
      }
      if (c == 0) complete = true;
    }
  }

  res.upper = s.best_ma;
  res.lower = complete ? s.best_ma : std::max(glb, std::min(s.frontier_lb, s.best_ma));
  res.exact = res.lower == res.upper;
  res.nodes_explored = s.nodes;
  if (nb == 1) {
    res.witness = std::vector<JoinStep>{};
  } else {
    res.witness = reconstruct_witness(s);
  }
  res.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  return res;
}

int validate_witness(const MolecularGraph &g, const std::vector<JoinStep> &steps) {
  const int nb = g.bond_count();
  std::vector<int> elem(g.atom_count());
  for (int i = 0; i < g.atom_count(); ++i) elem[i] = element_index(g.atoms()[i].element);

  auto shape_code = [&](const std::vector<int> &edge_list) {
    std::vector<int> verts;
    for (int e : edge_list) {
      verts.push_back(g.bonds()[e].a);
      verts.push_back(g.bonds()[e].b);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    std::vector<int> pos(g.atom_count(), -1);
    for (size_t i = 0; i < verts.size(); ++i) pos[verts[i]] = static_cast<int>(i);
    detail::ColoredGraph cg;
    cg.n = static_cast<int>(verts.size());
    cg.color.resize(cg.n);
    for (size_t i = 0; i < verts.size(); ++i) cg.color[i] = elem[verts[i]];
    for (int e : edge_list)
      cg.edges.push_back({pos[g.bonds()[e].a], pos[g.bonds()[e].b], g.bonds()[e].order});
    return detail::canonical_code(cg);
  };

  auto connected = [&](const std::vector<int> &edge_list) {
    if (edge_list.empty()) return false;
    std::map<int, std::vector<int>> vert_edges;
    for (int e : edge_list) {
      vert_edges[g.bonds()[e].a].push_back(e);
      vert_edges[g.bonds()[e].b].push_back(e);
    }
    std::set<int> seen{edge_list.front()};
    std::vector<int> stack{edge_list.front()};
    while (!stack.empty()) {
      int e = stack.back();
      stack.pop_back();
      for (int v : {g.bonds()[e].a, g.bonds()[e].b})
        for (int f : vert_edges[v])
          if (seen.insert(f).second) stack.push_back(f);
    }
    return seen.size() == edge_list.size();
  };

  std::vector<std::string> result_shape(steps.size());
  for (size_t i = 0; i < steps.size(); ++i) {
    const JoinStep &st = steps[i];
    auto check_operand = [&](int ref, const std::vector<int> &edges) {
      if (edges.empty()) throw Error("witness operand is empty");
      if (ref < 0) {
        if (edges.size() != 1) throw Error("bond operand must be a single edge");
      } else {
        if (ref >= static_cast<int>(i)) throw Error("operand references a later step");
        if (shape_code(edges) != result_shape[ref])
          throw Error("operand placement is not isomorphic to the referenced object");
      }
    };
    check_operand(st.lhs_ref, st.lhs_edges);
    check_operand(st.rhs_ref, st.rhs_edges);
    std::set<int> lhs(st.lhs_edges.begin(), st.lhs_edges.end());
    for (int e : st.rhs_edges)
      if (lhs.count(e)) throw Error("witness operands overlap");
    std::vector<int> un = st.lhs_edges;
    un.insert(un.end(), st.rhs_edges.begin(), st.rhs_edges.end());
    std::sort(un.begin(), un.end());
    std::vector<int> sorted_result = st.result_edges;
    std::sort(sorted_result.begin(), sorted_result.end());
    if (un != sorted_result) throw Error("witness result is not the union of operands");
    if (!connected(sorted_result)) throw Error("witness intermediate is disconnected");
    result_shape[i] = shape_code(sorted_result);
  }
  if (!steps.empty()) {
    std::vector<int> all(static_cast<size_t>(nb));
    for (int i = 0; i < nb; ++i) all[static_cast<size_t>(i)] = i;
    std::vector<int> last = steps.back().result_edges;
    std::sort(last.begin(), last.end());
    if (last != all) throw Error("witness does not terminate at the full graph");
  } else if (nb != 1) {
    throw Error("empty witness is only valid for a single-bond graph");
  }
  return static_cast<int>(steps.size());
}

}  // namespace assemblage
