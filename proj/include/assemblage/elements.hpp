#ifndef ASSEMBLAGE_ELEMENTS_HPP
#define ASSEMBLAGE_ELEMENTS_HPP

#include <string>
#include <string_view>
#include <vector>

namespace assemblage {

// Static properties for the supported element set (organic subset plus H).
struct ElementInfo {
  std::string symbol;
  double atomic_mass;            // standard atomic weight, u
  int valence_electrons;         // outer-shell electron count
  std::vector<int> valences;     // standard valences, ascending (e.g. S: 2,4,6)
  bool aromatic_ok;              // may appear as a lowercase aromatic atom
};

// Looks up an element by symbol; throws UnknownElement for anything outside
// the supported set (H, B, C, N, O, F, P, S, Cl, Br, I).
const ElementInfo &element_info(std::string_view symbol);

bool is_known_element(std::string_view symbol);

// Stable index of the element in the supported set; used for canonical codes.
int element_index(std::string_view symbol);

// Smallest standard valence >= bond order sum, or the largest one if the sum
// exceeds them all.  Used for implicit hydrogen filling.
int default_valence(std::string_view symbol, int order_sum);

double atomic_mass(std::string_view symbol);

}  // namespace assemblage

#endif
