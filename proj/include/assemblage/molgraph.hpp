#ifndef ASSEMBLAGE_MOLGRAPH_HPP
#define ASSEMBLAGE_MOLGRAPH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace assemblage {

struct Atom {
  std::string element;  // atomic symbol, e.g. "C", "Cl"
  int charge = 0;
  int implicit_h = 0;   // implicit hydrogen count; hydrogens are never vertices
};

struct Bond {
  int a = 0;
  int b = 0;
  int order = 1;  // 1, 2 or 3; aromatic input must have been kekulized
};

// Heavy-atom molecular graph.  Connected, no self loops, at most one bond per
// atom pair.  Immutable after construction; all operations are pure.
class MolecularGraph {
 public:
  MolecularGraph() = default;
  // Validates the invariants above and builds the adjacency index.
  MolecularGraph(std::vector<Atom> atoms, std::vector<Bond> bonds, std::string name = "");

  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const std::string &name() const { return name_; }

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }

  struct Neighbor {
    int atom;
    int bond;
  };
  const std::vector<Neighbor> &neighbors(int atom) const { return adjacency_[atom]; }
  int degree(int atom) const { return static_cast<int>(adjacency_[atom].size()); }
  // Sum of bond orders over heavy neighbors.
  int order_sum(int atom) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::string name_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

// Pre-kekulization form: atoms may carry aromatic flags, bonds may be marked
// aromatic (order 0).  Produced by the SMILES reader.
struct AromaticAtom {
  std::string element;
  int charge = 0;
  bool aromatic = false;
  int explicit_h = -1;  // -1: fill from standard valence after kekulization
};

struct AromaticBond {
  int a = 0;
  int b = 0;
  int order = 0;  // 0 = aromatic, else 1..3
};

struct AromaticGraph {
  std::vector<AromaticAtom> atoms;
  std::vector<AromaticBond> bonds;
  std::string name;
};

// Assigns alternating single/double orders to aromatic bonds so that every
// aromatic atom's valence is satisfied, then fills implicit hydrogens.
// Deterministic: matching prefers the lowest atom index.  Throws
// KekulizationFailure when no assignment exists.
MolecularGraph kekulize(const AromaticGraph &g);

// Parses the supported SMILES subset (organic-subset atoms, bracket atoms
// with charge/explicit H, ring closures, branches, -/=/# bonds, aromatic
// lowercase).  Multi-fragment input ('.') is rejected; see split_components.
MolecularGraph parse_smiles(const std::string &text);

// Splits a possibly multi-fragment SMILES on top-level '.' and parses each
// component separately.
std::vector<MolecularGraph> split_components(const std::string &text);

// Canonical SMILES-style serialization; parse(write(g)) is isomorphic to g.
std::string write_smiles(const MolecularGraph &g);

// Iterative neighborhood refinement (Morgan-style) run to a fixed point.
// Initial invariant per atom: (element, charge, H count, degree, incident
// bond order sum).  Class ids are contiguous and stable under atom
// permutation up to relabeling.
struct EquivalenceClasses {
  std::vector<int> atom_class;
  std::vector<int> bond_class;
  int n_atom_classes = 0;
  int n_bond_classes = 0;
  int rounds = 0;
};

EquivalenceClasses equivalence_classes(const MolecularGraph &g);

// Sum of standard atomic masses including implicit hydrogens.
double molecular_weight(const MolecularGraph &g);

// Canonical key: refinement classes plus a lexicographically minimal code
// obtained by individualization.  Equal keys <=> isomorphic graphs (element,
// charge, implicit H and bond orders all significant).
std::string canonical_key(const MolecularGraph &g);

// Returns a copy with atoms permuted by `perm` (new index = perm[old index]).
MolecularGraph permute_atoms(const MolecularGraph &g, const std::vector<int> &perm);

// Replaces the element of one atom, re-deriving implicit hydrogens from the
// standard valence.  Throws InvalidSubstitution when the incident bond order
// sum exceeds the new element's largest standard valence.
MolecularGraph substitute_element(const MolecularGraph &g, int atom, const std::string &element);

}  // namespace assemblage

#endif
