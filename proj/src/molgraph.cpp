#include "assemblage/molgraph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "assemblage/elements.hpp"
#include "assemblage/errors.hpp"

namespace assemblage {

MolecularGraph::MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds, std::string name)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)), name_(std::move(name)) {
  const int n = static_cast<int>(atoms_.size());
  if (n == 0) throw UnparsableSmiles("molecule has no atoms");
  for (const auto &a : atoms_) element_info(a.element);  // validates symbols

  std::set<std::pair<int, int>> seen;
  for (auto &b : bonds_) {
    if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n)
      throw UnparsableSmiles("bond endpoint out of range");
    if (b.a == b.b) throw UnparsableSmiles("self-loop bond");
    if (b.order < 1 || b.order > 3) throw UnparsableSmiles("bond order must be 1, 2 or 3");
    if (b.a > b.b) std::swap(b.a, b.b);
    if (!seen.insert({b.a, b.b}).second)
      throw UnparsableSmiles("duplicate bond between atom pair");
  }

  adjacency_.assign(n, {});
  for (int i = 0; i < static_cast<int>(bonds_.size()); ++i) {
    adjacency_[bonds_[i].a].push_back({bonds_[i].b, i});
    adjacency_[bonds_[i].b].push_back({bonds_[i].a, i});
  }

  // Connectivity check.
  std::vector<char> visited(n, 0);
  std::vector<int> stack = {0};
  visited[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto &nb : adjacency_[v]) {
      if (!visited[nb.atom]) {
        visited[nb.atom] = 1;
        ++reached;
        stack.push_back(nb.atom);
      }
    }
  }
  if (reached != n)
    throw UnparsableSmiles("molecular graph is disconnected; use split_components");
}

int MolecularGraph::order_sum(int atom) const {
  int s = 0;
  for (const auto &nb : adjacency_[atom]) s += bonds_[nb.bond].order;
  return s;
}

double molecular_weight(const MolecularGraph &g) {
  double mass = 0.0;
  for (const auto &a : g.atoms()) {
    mass += atomic_mass(a.element);
    mass += a.implicit_h * atomic_mass("H");
  }
  return mass;
}

EquivalenceClasses equivalence_classes(const MolecularGraph &g) {
  const int n = g.atom_count();
  EquivalenceClasses ec;
  ec.atom_class.resize(n);

  // Initial invariant.
  {
    std::map<std::tuple<std::string, int, int, int, int>, int> ids;
    for (int i = 0; i < n; ++i) {
      auto key = std::make_tuple(g.atoms()[i].element, g.atoms()[i].charge,
                                 g.atoms()[i].implicit_h, g.degree(i), g.order_sum(i));
      auto [it, inserted] = ids.try_emplace(key, static_cast<int>(ids.size()));
      ec.atom_class[i] = it->second;
    }
  }

  // Refine until the partition is stable.  Signature = (own class, sorted
  // multiset of (neighbor class, bond order)); the class ids assigned each
  // round are ranks of sorted signatures, so the partition is independent of
  // input atom order.
  int n_classes = 0;
  for (;;) {
    ++ec.rounds;
    std::vector<std::pair<std::vector<int>, int>> sigs(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> sig;
      sig.push_back(ec.atom_class[i]);
      std::vector<std::pair<int, int>> nbr;
      for (const auto &nb : g.neighbors(i))
        nbr.emplace_back(ec.atom_class[nb.atom], g.bonds()[nb.bond].order);
      std::sort(nbr.begin(), nbr.end());
      for (auto &[c, o] : nbr) {
        sig.push_back(c);
        sig.push_back(o);
      }
      sigs[i] = {std::move(sig), i};
    }
    std::map<std::vector<int>, int> ids;
    for (const auto &[sig, i] : sigs) ids.try_emplace(sig, 0);
    int next = 0;
    for (auto &[sig, id] : ids) id = next++;
    std::vector<int> updated(n);
    for (const auto &[sig, i] : sigs) updated[i] = ids[sig];
    bool changed = next != n_classes || updated != ec.atom_class;
    // Relabeling alone does not count as change once class count is stable.
    if (next == n_classes) {
      changed = false;
      for (int i = 0; i < n && !changed; ++i)
        for (int j = i + 1; j < n && !changed; ++j)
          if ((updated[i] == updated[j]) != (ec.atom_class[i] == ec.atom_class[j])) changed = true;
    }
    ec.atom_class = std::move(updated);
    n_classes = next;
    if (!changed) break;
  }
  ec.n_atom_classes = n_classes;

  // Bond classes from (order, unordered endpoint classes).
  std::map<std::tuple<int, int, int>, int> bond_ids;
  ec.bond_class.resize(g.bond_count());
  for (int i = 0; i < g.bond_count(); ++i) {
    const auto &b = g.bonds()[i];
    int ca = ec.atom_class[b.a], cb = ec.atom_class[b.b];
    auto key = std::make_tuple(b.order, std::min(ca, cb), std::max(ca, cb));
    auto [it, inserted] = bond_ids.try_emplace(key, static_cast<int>(bond_ids.size()));
    ec.bond_class[i] = it->second;
  }
  ec.n_bond_classes = static_cast<int>(bond_ids.size());
  return ec;
}

MolecularGraph permute_atoms(const MolecularGraph &g, const std::vector<int> &perm) {
  std::vector<Atom> atoms(g.atom_count());
  for (int i = 0; i < g.atom_count(); ++i) atoms[perm[i]] = g.atoms()[i];
  std::vector<Bond> bonds;
  bonds.reserve(g.bond_count());
  for (const auto &b : g.bonds()) bonds.push_back({perm[b.a], perm[b.b], b.order});
  return MolecularGraph(std::move(atoms), std::move(bonds), g.name());
}

MolecularGraph substitute_element(const MolecularGraph &g, int atom, const std::string &element) {
  if (atom < 0 || atom >= g.atom_count())
    throw InvalidSubstitution("atom index out of range");
  const auto &info = element_info(element);
  int sum = g.order_sum(atom);
  if (sum > info.valences.back())
    throw InvalidSubstitution("bond order sum " + std::to_string(sum) + " exceeds valence of " +
                              element);
  std::vector<Atom> atoms = g.atoms();
  atoms[atom].element = element;
  atoms[atom].charge = 0;
  atoms[atom].implicit_h = default_valence(element, sum) - sum;
  return MolecularGraph(std::move(atoms), g.bonds(), g.name());
}

}  // namespace assemblage
