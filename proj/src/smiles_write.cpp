#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "assemblage/elements.hpp"
#include "assemblage/errors.hpp"
#include "assemblage/molgraph.hpp"
#include "canonical.hpp"

namespace assemblage {

namespace {

detail::ColoredGraph molecule_colored_graph(const MolecularGraph &g) {
  detail::ColoredGraph cg;
  cg.n = g.atom_count();
  cg.color.resize(cg.n);
  for (int i = 0; i < cg.n; ++i) {
    const Atom &a = g.atoms()[i];
    cg.color[i] = (element_index(a.element) * 64 + (a.charge + 16)) * 16 + std::min(a.implicit_h, 15);
  }
  for (const auto &b : g.bonds()) cg.edges.push_back({b.a, b.b, b.order});
  return cg;
}

std::string atom_token(const Atom &a, int order_sum) {
  bool bare = a.charge == 0 &&
              a.implicit_h == default_valence(a.element, order_sum) - order_sum;
  if (bare) return a.element;
  std::string t = "[" + a.element;
  if (a.implicit_h > 0) {
    t += "H";
    if (a.implicit_h > 1) t += std::to_string(a.implicit_h);
  }
  if (a.charge > 0) t += (a.charge == 1) ? "+" : "+" + std::to_string(a.charge);
  if (a.charge < 0) t += (a.charge == -1) ? "-" : "-" + std::to_string(-a.charge);
  return t + "]";
}

const char *bond_token(int order) {
  switch (order) {
    case 2:
      return "=";
    case 3:
      return "#";
    default:
      return "";
  }
}

// Canonical-order writer.  First pass classifies tree vs ring bonds along the
// canonical DFS; second pass emits atoms with ring-closure digits directly
// after each atom token, as the grammar requires.
struct Writer {
  const MolecularGraph &g;
  std::vector<int> pos;
  std::vector<char> visited;
  std::vector<char> tree_edge;
  std::map<int, int> label_of_ring_bond;
  std::vector<char> label_used;
  std::string out;

  explicit Writer(const MolecularGraph &graph)
      : g(graph),
        visited(graph.atom_count(), 0),
        tree_edge(graph.bond_count(), 0),
        label_used(100, 0) {
    pos = detail::canonical_order(molecule_colored_graph(g));
  }

  std::vector<std::pair<int, int>> ordered_neighbors(int v) const {
    std::vector<std::pair<int, int>> nbrs;  // (canonical pos of partner, bond)
    for (const auto &nb : g.neighbors(v)) nbrs.emplace_back(pos[nb.atom], nb.bond);
    std::sort(nbrs.begin(), nbrs.end());
    return nbrs;
  }

  int partner(int bond, int v) const {
    return g.bonds()[bond].a == v ? g.bonds()[bond].b : g.bonds()[bond].a;
  }

  void classify(int v) {
    visited[v] = 1;
    for (const auto &[p, bond] : ordered_neighbors(v)) {
      int u = partner(bond, v);
      if (!visited[u]) {
        tree_edge[bond] = 1;
        classify(u);
      }
    }
  }

  int alloc_label() {
    for (int l = 1; l < 100; ++l) {
      if (!label_used[l]) {
        label_used[l] = 1;
        return l;
      }
    }
    throw UnsupportedFeature("more than 99 simultaneously open ring closures");
  }

  void emit(int v, int from_bond) {
    visited[v] = 1;
    if (from_bond >= 0) out += bond_token(g.bonds()[from_bond].order);
    out += atom_token(g.atoms()[v], g.order_sum(v));

    auto nbrs = ordered_neighbors(v);
    for (const auto &[p, bond] : nbrs) {
      if (tree_edge[bond]) continue;
      auto it = label_of_ring_bond.find(bond);
      if (it == label_of_ring_bond.end()) {
        int label = alloc_label();
        label_of_ring_bond[bond] = label;
        out += bond_token(g.bonds()[bond].order);
        if (label >= 10) out += "%";
        out += std::to_string(label);
      } else {
        if (it->second >= 10) out += "%";
        out += std::to_string(it->second);
        label_used[it->second] = 0;
        label_of_ring_bond.erase(it);
      }
    }

    std::vector<std::pair<int, int>> children;
    for (const auto &[p, bond] : nbrs)
      if (tree_edge[bond] && bond != from_bond && !visited[partner(bond, v)])
        children.emplace_back(p, bond);
    for (size_t i = 0; i < children.size(); ++i) {
      bool last = (i + 1 == children.size());
      if (!last) out += "(";
      emit(partner(children[i].second, v), children[i].second);
      if (!last) out += ")";
    }
  }

  std::string write() {
    int start = 0;
    for (int v = 0; v < g.atom_count(); ++v)
      if (pos[v] == 0) start = v;
    classify(start);
    std::fill(visited.begin(), visited.end(), 0);
    emit(start, -1);
    return out;
  }
};

}  // namespace

std::string write_smiles(const MolecularGraph &g) { return Writer(g).write(); }

std::string canonical_key(const MolecularGraph &g) {
  std::string code = detail::canonical_code(molecule_colored_graph(g));
  static const char *hex = "0123456789abcdef";
  std::string key;
  key.reserve(code.size() * 2);
  for (unsigned char c : code) {
    key.push_back(hex[c >> 4]);
    key.push_back(hex[c & 0xf]);
  }
  return key;
}

}  // namespace assemblage
