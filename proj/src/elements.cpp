#include "assemblage/elements.hpp"

#include <array>

#include "assemblage/errors.hpp"

namespace assemblage {

namespace {

const std::array<ElementInfo, 11> kElements = {{
    {"H", 1.008, 1, {1}, false},
    {"B", 10.81, 3, {3}, true},
    {"C", 12.011, 4, {4}, true},
    {"N", 14.007, 5, {3}, true},
    {"O", 15.999, 6, {2}, true},
    {"F", 18.998, 7, {1}, false},
    {"P", 30.974, 5, {3, 5}, true},
    {"S", 32.06, 6, {2, 4, 6}, true},
    {"Cl", 35.45, 7, {1}, false},
    {"Br", 79.904, 7, {1}, false},
    {"I", 126.904, 7, {1}, false},
}};

}  // namespace

const ElementInfo &element_info(std::string_view symbol) {
  for (const auto &e : kElements) {
    if (e.symbol == symbol) return e;
  }
  throw UnknownElement("unknown element symbol: '" + std::string(symbol) + "'");
}

bool is_known_element(std::string_view symbol) {
  for (const auto &e : kElements) {
    if (e.symbol == symbol) return true;
  }
  return false;
}

int element_index(std::string_view symbol) {
  for (size_t i = 0; i < kElements.size(); ++i) {
    if (kElements[i].symbol == symbol) return static_cast<int>(i);
  }
  throw UnknownElement("unknown element symbol: '" + std::string(symbol) + "'");
}

int default_valence(std::string_view symbol, int order_sum) {
  const auto &info = element_info(symbol);
  for (int v : info.valences) {
    if (v >= order_sum) return v;
  }
  return info.valences.back();
}

double atomic_mass(std::string_view symbol) { return element_info(symbol).atomic_mass; }

}  // namespace assemblage
