#include "rgi/nfa.hpp"

#include <algorithm>

namespace rgi {
namespace {

struct Fragment {
  int in;
  int out;
};

Fragment build(Nfa& nfa, const RegexNode& node) {
  using K = RegexNode::Kind;
  switch (node.kind) {
    case K::Literal: {
      const int a = nfa.add_state();
      const int b = nfa.add_state();
      nfa.add_edge(a, node.symbol, b);
      return {a, b};
    }
    case K::Concat: {
      if (node.children.empty()) {
        const int a = nfa.add_state();
        return {a, a};
      }
      Fragment first = build(nfa, node.children.front());
      int tail = first.out;
      for (std::size_t i = 1; i < node.children.size(); ++i) {
        Fragment f = build(nfa, node.children[i]);
        nfa.add_edge(tail, kEpsilon, f.in);
        tail = f.out;
      }
      return {first.in, tail};
    }
    case K::Alt: {
      const int a = nfa.add_state();
      const int b = nfa.add_state();
      for (const auto& child : node.children) {
        Fragment f = build(nfa, child);
        nfa.add_edge(a, kEpsilon, f.in);
        nfa.add_edge(f.out, kEpsilon, b);
      }
      return {a, b};
    }
    case K::Star: {
      const int a = nfa.add_state();
      const int b = nfa.add_state();
      Fragment f = build(nfa, node.children.front());
      nfa.add_edge(a, kEpsilon, f.in);
      nfa.add_edge(a, kEpsilon, b);
      nfa.add_edge(f.out, kEpsilon, f.in);
      nfa.add_edge(f.out, kEpsilon, b);
      return {a, b};
    }
    case K::Optional: {
      const int a = nfa.add_state();
      const int b = nfa.add_state();
      Fragment f = build(nfa, node.children.front());
      nfa.add_edge(a, kEpsilon, f.in);
      nfa.add_edge(a, kEpsilon, b);
      nfa.add_edge(f.out, kEpsilon, b);
      return {a, b};
    }
  }
  return {0, 0};
}

}  // namespace

Nfa compile_nfa(const RegexAst& ast) {
  Nfa nfa;
  nfa.alphabet = ast.alphabet;
  Fragment f = build(nfa, ast.root);
  nfa.start = f.in;
  nfa.accepting[static_cast<std::size_t>(f.out)] = true;
  return nfa;
}

std::vector<int> epsilon_closure(const Nfa& nfa, std::vector<int> states) {
  std::vector<bool> seen(static_cast<std::size_t>(nfa.size()), false);
  std::vector<int> stack;
  for (int s : states) {
    if (!seen[static_cast<std::size_t>(s)]) {
      seen[static_cast<std::size_t>(s)] = true;
      stack.push_back(s);
    }
  }
  std::vector<int> out;
  while (!stack.empty()) {
    const int s = stack.back();
    stack.pop_back();
    out.push_back(s);
    for (const auto& e : nfa.edges[static_cast<std::size_t>(s)]) {
      if (e.symbol == kEpsilon && !seen[static_cast<std::size_t>(e.target)]) {
        seen[static_cast<std::size_t>(e.target)] = true;
        stack.push_back(e.target);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool nfa_accepts(const Nfa& nfa, const Word& word) {
  std::vector<int> current = epsilon_closure(nfa, {nfa.start});
  for (Symbol a : word) {
    std::vector<int> next;
    for (int s : current)
      for (const auto& e : nfa.edges[static_cast<std::size_t>(s)])
        if (e.symbol == a) next.push_back(e.target);
    current = epsilon_closure(nfa, std::move(next));
    if (current.empty()) return false;
  }
  return std::any_of(current.begin(), current.end(),
                     [&](int s) { return nfa.accepting[static_cast<std::size_t>(s)]; });
}

}  // namespace rgi
