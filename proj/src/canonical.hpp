#ifndef ASSEMBLAGE_SRC_CANONICAL_HPP
#define ASSEMBLAGE_SRC_CANONICAL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace assemblage::detail {

// Vertex- and edge-colored undirected graph for canonicalization.
struct ColoredGraph {
  int n = 0;
  std::vector<int> color;  // size n
  struct Edge {
    int a, b, color;
  };
  std::vector<Edge> edges;
};

// Exact canonical code via refinement plus individualization: equal codes
// if and only if the colored graphs are isomorphic.
std::string canonical_code(const ColoredGraph &g);

// A vertex order realizing the canonical code (new index = order[v]).
std::vector<int> canonical_order(const ColoredGraph &g);

}  // namespace assemblage::detail

#endif
