#include <cctype>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "assemblage/elements.hpp"
#include "assemblage/errors.hpp"
#include "assemblage/molgraph.hpp"

namespace assemblage {

namespace {

struct RingRef {
  int atom;
  int order;  // -1 = unspecified, 0 = aromatic
};

class SmilesReader {
 public:
  explicit SmilesReader(const std::string &text) : text_(text) {}

  AromaticGraph read() {
    if (text_.empty()) throw UnparsableSmiles("empty SMILES");
    parse_chain();
    if (pos_ != text_.size())
      throw UnparsableSmiles("unexpected character '" + std::string(1, text_[pos_]) +
                             "' at position " + std::to_string(pos_));
    if (!rings_.empty())
      throw UnparsableSmiles("unclosed ring bond " + std::to_string(rings_.begin()->first));
    if (g_.atoms.empty()) throw UnparsableSmiles("no atoms in SMILES");
    return std::move(g_);
  }

 private:
  [[noreturn]] void fail(const std::string &msg) {
    throw UnparsableSmiles(msg + " at position " + std::to_string(pos_) + " in '" + text_ + "'");
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void parse_chain() {
    std::vector<int> stack;        // open branch anchors
    int prev = -1;                 // atom awaiting the next bond
    int pending_order = -1;        // bond symbol seen since prev
    while (!eof()) {
      char c = peek();
      if (c == '-' || c == '=' || c == '#') {
        if (pending_order != -1) fail("duplicate bond symbol");
        pending_order = (c == '-') ? 1 : (c == '=' ? 2 : 3);
        ++pos_;
      } else if (c == ':' || c == '/' || c == '\\' || c == '@' || c == '*' || c == '~' ||
                 c == '$') {
        throw UnsupportedFeature(std::string("SMILES feature '") + c + "' is not supported");
      } else if (c == '.') {
        throw UnsupportedFeature(
            "multi-fragment SMILES is rejected for scoring; use split_components");
      } else if (c == '(') {
        if (prev < 0) fail("branch before any atom");
        if (pending_order != -1) fail("bond symbol before '('");
        stack.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (stack.empty()) fail("unmatched ')'");
        prev = stack.back();
        stack.pop_back();
        if (pending_order != -1) fail("dangling bond symbol before ')'");
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure before any atom");
        int ring = parse_ring_number();
        close_or_open_ring(ring, prev, pending_order);
        pending_order = -1;
      } else {
        int atom = parse_atom();
        if (prev >= 0) add_bond(prev, atom, pending_order);
        pending_order = -1;
        prev = atom;
      }
    }
    if (!stack.empty()) fail("unmatched '('");
    if (pending_order != -1) fail("dangling bond symbol at end");
  }

  int parse_ring_number() {
    if (peek() == '%') {
      ++pos_;
      if (pos_ + 1 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))
        fail("'%' ring closure needs two digits");
      int v = (text_[pos_] - '0') * 10 + (text_[pos_ + 1] - '0');
      pos_ += 2;
      return v;
    }
    return text_[pos_++] - '0';
  }

  void close_or_open_ring(int ring, int atom, int order) {
    auto it = rings_.find(ring);
    if (it == rings_.end()) {
      rings_[ring] = {atom, order};
      return;
    }
    RingRef open = it->second;
    rings_.erase(it);
    if (open.atom == atom) fail("ring bond to self");
    int resolved;
    if (open.order == -1 && order == -1) {
      resolved = (g_.atoms[open.atom].aromatic && g_.atoms[atom].aromatic) ? 0 : 1;
    } else if (open.order == -1 || order == -1 || open.order == order) {
      resolved = (open.order == -1) ? order : open.order;
    } else {
      fail("conflicting bond orders on ring closure " + std::to_string(ring));
    }
    push_bond(open.atom, atom, resolved);
  }

  void add_bond(int a, int b, int order) {
    if (order == -1) order = (g_.atoms[a].aromatic && g_.atoms[b].aromatic) ? 0 : 1;
    push_bond(a, b, order);
  }

  void push_bond(int a, int b, int order) {
    for (const auto &bond : g_.bonds)
      if ((bond.a == a && bond.b == b) || (bond.a == b && bond.b == a))
        fail("duplicate bond between atoms");
    g_.bonds.push_back({a, b, order});
  }

  // Organic-subset atom, aromatic lowercase, or bracket atom.
  int parse_atom() {
    char c = peek();
    if (c == '[') return parse_bracket_atom();

    static const char *kTwo[] = {"Cl", "Br"};
    for (const char *sym : kTwo) {
      if (text_.compare(pos_, 2, sym) == 0) {
        pos_ += 2;
        return push_atom(sym, 0, -1, false);
      }
    }
    static const char *kOne = "BCNOPSFI";
    if (std::strchr(kOne, c) != nullptr) {
      ++pos_;
      return push_atom(std::string(1, c), 0, -1, false);
    }
    static const char *kAromatic = "bcnops";
    if (std::strchr(kAromatic, c) != nullptr) {
      ++pos_;
      std::string sym(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      return push_atom(sym, 0, -1, true);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  int parse_bracket_atom() {
    ++pos_;  // '['
    if (eof()) fail("unterminated bracket atom");
    if (std::isdigit(static_cast<unsigned char>(peek())))
      throw UnsupportedFeature("isotope labels are not supported");
    bool aromatic = false;
    std::string sym;
    char c = peek();
    if (std::isupper(static_cast<unsigned char>(c))) {
      sym = std::string(1, c);
      ++pos_;
      if (!eof() && std::islower(static_cast<unsigned char>(peek()))) {
        std::string two = sym + peek();
        if (is_known_element(two)) {
          sym = two;
          ++pos_;
        }
      }
    } else if (std::islower(static_cast<unsigned char>(c))) {
      sym = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      aromatic = true;
      ++pos_;
    } else if (c == '*') {
      throw UnsupportedFeature("wildcard atoms are not supported");
    } else {
      fail("expected element symbol in bracket atom");
    }
    if (!is_known_element(sym) || sym == "H")
      throw UnsupportedFeature("element '" + sym + "' is outside the supported subset");
    if (aromatic && !element_info(sym).aromatic_ok)
      fail("element '" + sym + "' cannot be aromatic");

    int hcount = 0;
    int charge = 0;
    while (!eof() && peek() != ']') {
      char t = peek();
      if (t == 'H') {
        ++pos_;
        hcount = 1;
        if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) hcount = text_[pos_++] - '0';
      } else if (t == '+' || t == '-') {
        int sign = (t == '+') ? 1 : -1;
        ++pos_;
        if (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
          charge = sign * (text_[pos_++] - '0');
        } else {
          charge = sign;
          while (!eof() && peek() == t) {
            charge += sign;
            ++pos_;
          }
        }
      } else if (t == '@') {
        throw UnsupportedFeature("stereo markers are not supported");
      } else if (t == ':') {
        throw UnsupportedFeature("atom class labels are not supported");
      } else {
        fail(std::string("unexpected '") + t + "' in bracket atom");
      }
    }
    if (eof()) fail("unterminated bracket atom");
    ++pos_;  // ']'
    return push_atom(sym, charge, hcount, aromatic);
  }

  int push_atom(const std::string &sym, int charge, int explicit_h, bool aromatic) {
    g_.atoms.push_back({sym, charge, aromatic, explicit_h});
    return static_cast<int>(g_.atoms.size()) - 1;
  }

  const std::string &text_;
  size_t pos_ = 0;
  AromaticGraph g_;
  std::map<int, RingRef> rings_;
};

}  // namespace

MolecularGraph parse_smiles(const std::string &text) {
  // Strip surrounding whitespace; the payload itself must be plain ASCII.
  size_t begin = text.find_first_not_of(" \t\r\n");
  size_t end = text.find_last_not_of(" \t\r\n");
  if (begin == std::string::npos) throw UnparsableSmiles("empty SMILES");
  for (size_t i = begin; i <= end; ++i)
    if (static_cast<unsigned char>(text[i]) > 127)
      throw UnparsableSmiles("SMILES must be ASCII");
  AromaticGraph raw = SmilesReader(text.substr(begin, end - begin + 1)).read();
  return kekulize(raw);
}

std::vector<MolecularGraph> split_components(const std::string &text) {
  std::vector<MolecularGraph> out;
  std::string current;
  int depth = 0;
  bool bracket = false;
  auto flush = [&]() {
    if (!current.empty()) {
      out.push_back(parse_smiles(current));
      current.clear();
    }
  };
  for (char c : text) {
    if (c == '[') bracket = true;
    if (c == ']') bracket = false;
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == '.' && depth == 0 && !bracket) {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  if (out.empty()) throw UnparsableSmiles("empty SMILES");
  return out;
}

}  // namespace assemblage
