#include <algorithm>
#include <string>
#include <vector>

#include "assemblage/elements.hpp"
#include "assemblage/errors.hpp"
#include "assemblage/molgraph.hpp"

namespace assemblage {

namespace {

// Effective valence target after charge adjustment.  Positive charge raises
// the target for N/O/S/P (e.g. pyridinium), lowers it for B; carbon loses a
// slot either way (carbocation or carbanion).
int effective_valence(const AromaticAtom &a) {
  const auto &info = element_info(a.element);
  int base = info.valences.front();
  if (a.element == "C") return base - std::abs(a.charge);
  if (a.element == "B") return base - a.charge;
  return base + a.charge;
}

// Exact matching by backtracking, lowest atom index first.  Aromatic systems
// in molecules are small, so an exponential worst case is acceptable.
bool match_pi(int idx, const std::vector<int> &pi_atoms,
              const std::vector<std::vector<std::pair<int, int>>> &cand,  // (atom, bond)
              std::vector<int> &bond_of, std::vector<char> &matched) {
  if (idx == static_cast<int>(pi_atoms.size())) return true;
  int v = pi_atoms[idx];
  if (matched[v]) return match_pi(idx + 1, pi_atoms, cand, bond_of, matched);
  for (const auto &[u, bond] : cand[v]) {
    if (matched[u]) continue;
    matched[v] = matched[u] = 1;
    bond_of[v] = bond_of[u] = bond;
    if (match_pi(idx + 1, pi_atoms, cand, bond_of, matched)) return true;
    matched[v] = matched[u] = 0;
    bond_of[v] = bond_of[u] = -1;
  }
  return false;
}

}  // namespace

MolecularGraph kekulize(const AromaticGraph &g) {
  const int n = static_cast<int>(g.atoms.size());
  std::vector<int> sigma(n, 0);            // neighbor count plus explicit H
  std::vector<char> has_aromatic_bond(n, 0);
  for (const auto &b : g.bonds) {
    sigma[b.a] += (b.order == 0) ? 1 : b.order;
    sigma[b.b] += (b.order == 0) ? 1 : b.order;
    if (b.order == 0) has_aromatic_bond[b.a] = has_aromatic_bond[b.b] = 1;
  }

  // Which aromatic atoms still need one double bond.
  std::vector<char> needs_pi(n, 0);
  for (int i = 0; i < n; ++i) {
    const auto &a = g.atoms[i];
    if (!a.aromatic) continue;
    if (!has_aromatic_bond[i])
      throw KekulizationFailure("aromatic atom " + std::to_string(i) +
                                " has no aromatic bond (aromatic atoms must form rings)");
    int s = sigma[i] + std::max(a.explicit_h, 0);
    int deficit = effective_valence(a) - s;
    if (deficit >= 1) needs_pi[i] = 1;
  }

  std::vector<std::vector<std::pair<int, int>>> cand(n);
  for (int bi = 0; bi < static_cast<int>(g.bonds.size()); ++bi) {
    const auto &b = g.bonds[bi];
    if (b.order != 0) continue;
    if (needs_pi[b.a] && needs_pi[b.b]) {
      cand[b.a].emplace_back(b.b, bi);
      cand[b.b].emplace_back(b.a, bi);
    }
  }
  for (auto &c : cand) std::sort(c.begin(), c.end());

  std::vector<int> pi_atoms;
  for (int i = 0; i < n; ++i)
    if (needs_pi[i]) pi_atoms.push_back(i);

  std::vector<int> bond_of(n, -1);
  std::vector<char> matched(n, 0);
  if (!match_pi(0, pi_atoms, cand, bond_of, matched))
    throw KekulizationFailure("no valid alternating bond assignment for aromatic system");

  std::vector<char> is_double(g.bonds.size(), 0);
  for (int v : pi_atoms)
    if (bond_of[v] >= 0) is_double[bond_of[v]] = 1;

  std::vector<Bond> bonds;
  bonds.reserve(g.bonds.size());
  for (int bi = 0; bi < static_cast<int>(g.bonds.size()); ++bi) {
    const auto &b = g.bonds[bi];
    int order = (b.order == 0) ? (is_double[bi] ? 2 : 1) : b.order;
    bonds.push_back({b.a, b.b, order});
  }

  std::vector<int> final_sum(n, 0);
  for (const auto &b : bonds) {
    final_sum[b.a] += b.order;
    final_sum[b.b] += b.order;
  }

  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto &a = g.atoms[i];
    int h;
    if (a.explicit_h >= 0) {
      h = a.explicit_h;
    } else if (a.aromatic) {
      h = std::max(0, effective_valence(a) - final_sum[i]);
    } else {
      // Only neutral organic-subset atoms reach here; charged atoms are
      // bracket atoms and carry an explicit H count.
      h = std::max(0, default_valence(a.element, final_sum[i]) - final_sum[i]);
    }
    atoms.push_back({a.element, a.charge, h});
  }

  return MolecularGraph(std::move(atoms), std::move(bonds), g.name);
}

}  // namespace assemblage
