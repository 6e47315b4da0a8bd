#pragma once

#include <utility>
#include <vector>

#include "rgi/alphabet.hpp"
#include "rgi/regex.hpp"

namespace rgi {

inline constexpr Symbol kEpsilon = -1;

// Nondeterministic automaton with epsilon moves. States are 0..size()-1.
struct Nfa {
  struct Edge {
    Symbol symbol;  // kEpsilon for an epsilon move
    int target;
  };

  Alphabet alphabet;
  int start = 0;
  std::vector<bool> accepting;
  std::vector<std::vector<Edge>> edges;

  int size() const noexcept { return static_cast<int>(edges.size()); }
  int add_state() {
    edges.emplace_back();
    accepting.push_back(false);
    return size() - 1;
  }
  void add_edge(int from, Symbol symbol, int to) { edges[static_cast<std::size_t>(from)].push_back({symbol, to}); }
};

// Thompson construction; O(node count) states.
Nfa compile_nfa(const RegexAst& ast);

// Sorted epsilon closure of a state set.
std::vector<int> epsilon_closure(const Nfa& nfa, std::vector<int> states);

// Direct simulation, independent of any determinization.
bool nfa_accepts(const Nfa& nfa, const Word& word);

}  // namespace rgi
