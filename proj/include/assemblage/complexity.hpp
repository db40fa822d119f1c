#ifndef ASSEMBLAGE_COMPLEXITY_HPP
#define ASSEMBLAGE_COMPLEXITY_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "assemblage/molgraph.hpp"

namespace assemblage {

// Limits for the exact assembly search.  Whichever limit is hit first ends
// the search with certified bounds.  Node budgets are deterministic across
// machines; time budgets are not.
struct AssemblyBudget {
  std::optional<std::chrono::milliseconds> time_limit{std::chrono::milliseconds(60000)};
  std::optional<std::uint64_t> node_limit{10'000'000};

  static AssemblyBudget nodes_only(std::uint64_t n) {
    AssemblyBudget b;
    b.time_limit.reset();
    b.node_limit = n;
    return b;
  }
};

// One join of an assembly pathway.  Operands reference either a single bond
// (ref < 0) or the result of an earlier step; the edge lists give the
// operand's placement inside the target graph.
struct JoinStep {
  int lhs_ref = -1;
  int rhs_ref = -1;
  std::vector<int> lhs_edges;
  std::vector<int> rhs_edges;
  std::vector<int> result_edges;
};

struct AssemblyResult {
  int lower = 0;
  int upper = 0;
  bool exact = false;
  std::optional<std::vector<JoinStep>> witness;  // reconstructs target in `upper` joins
  std::chrono::milliseconds elapsed{0};
  std::uint64_t nodes_explored = 0;
};

// Assembly index by branch and bound over duplicate-subgraph factorings.
// Bonds are typed by (sorted endpoint elements, order); duplicate subgraphs
// must match on atom elements and bond orders.  Exact when the search
// completes inside the budget, otherwise certified (lower, upper).
AssemblyResult assembly_index(const MolecularGraph &g, const AssemblyBudget &budget = {});

// (ceil(log2 N_B), N_B - 1) without any search.
std::pair<int, int> assembly_bounds(const MolecularGraph &g);

// Bertz complexity: Shannon-style term over symmetry classes of two-bond
// connections plus an element-distribution term.
double bertz(const MolecularGraph &g);

// Boettcher complexity: per-atom microenvironment information with
// equivalent-atom halving.
double bottcher(const MolecularGraph &g);

struct EnsembleObservation {
  struct Object {
    int assembly_index = 0;
    long long copy_number = 1;
  };
  std::vector<Object> objects;

  int unique_count() const { return static_cast<int>(objects.size()); }
  long long total_count() const {
    long long t = 0;
    for (const auto &o : objects) t += o.copy_number;
    return t;
  }
};

// Assembly of an ensemble: sum of e^a_i * n_i / N_T over objects with
// copy number greater than one.
double ensemble_assembly(const EnsembleObservation &obs);

// Validates a witness pathway against the graph: operands disjoint, each a
// single bond or isomorphic to an earlier result, every intermediate
// connected, final step covers the whole graph.  Returns the join count.
int validate_witness(const MolecularGraph &g, const std::vector<JoinStep> &steps);

}  // namespace assemblage

#endif
