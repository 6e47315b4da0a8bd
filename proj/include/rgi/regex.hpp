#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rgi/alphabet.hpp"

namespace rgi {

// Regex syntax: literal tokens, juxtaposition (concatenation), `|`, postfix
// `*` and `?`, and parentheses. Over a single-character alphabet literals are
// read one character at a time; otherwise a literal is a maximal run of
// characters other than whitespace and operators.
struct RegexNode {
  enum class Kind { Literal, Concat, Alt, Star, Optional };

  Kind kind = Kind::Concat;
  Symbol symbol = -1;  // Literal only
  std::vector<RegexNode> children;

  static RegexNode literal(Symbol s) { return {Kind::Literal, s, {}}; }
  // A Concat with no children denotes the empty string.
  static RegexNode epsilon() { return {Kind::Concat, -1, {}}; }

  friend bool operator==(const RegexNode&, const RegexNode&) = default;
};

struct RegexAst {
  Alphabet alphabet;
  RegexNode root;
};

RegexAst parse_regex(std::string_view pattern, const Alphabet& alphabet);

// Alphabet of the tokens a pattern mentions, sorted. Used when no explicit
// alphabet is supplied.
Alphabet infer_alphabet(std::string_view pattern);

// Debug rendering, e.g. "star(concat(0,1))".
std::string to_string(const RegexNode& node, const Alphabet& alphabet);

std::size_t node_count(const RegexNode& node);

}  // namespace rgi
