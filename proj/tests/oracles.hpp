#pragma once
// Brute-force reference implementations used only by tests. Nothing here
// calls into the code paths it is used to check.

#include <optional>
#include <string>
#include <vector>

#include "rgi/alphabet.hpp"
#include "rgi/dfa.hpp"
#include "rgi/regex.hpp"
#include "rgi/rng.hpp"

namespace oracle {

using rgi::Alphabet;
using rgi::Dfa;
using rgi::Word;

// All words of length <= max_len in length-then-lex order.
inline std::vector<Word> all_words(std::size_t k, int max_len) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t a = 0; a < k; ++a) {
        Word w = out[i];
        w.push_back(static_cast<rgi::Symbol>(a));
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

// Membership by walking the table directly (missing edge rejects).
inline bool walk(const Dfa& d, const Word& w, int from) {
  int q = from;
  for (auto a : w) {
    q = d.next(q, a);
    if (q < 0) return false;
  }
  return d.accepting(q);
}

inline bool walk(const Dfa& d, const Word& w) { return walk(d, w, d.start()); }

// Shortest (then lex-first) word on which the two disagree, up to max_len.
inline std::optional<Word> first_disagreement(const Dfa& a, const Dfa& b, int max_len) {
  for (const auto& w : all_words(a.alphabet().size(), max_len))
    if (walk(a, w) != walk(b, w)) return w;
  return std::nullopt;
}

// States reachable from start.
inline std::vector<int> reachable(const Dfa& d) {
  std::vector<bool> seen(static_cast<std::size_t>(d.size()), false);
  std::vector<int> stack{d.start()}, out;
  seen[static_cast<std::size_t>(d.start())] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    out.push_back(q);
    for (std::size_t a = 0; a < d.alphabet().size(); ++a) {
      int t = d.next(q, static_cast<rgi::Symbol>(a));
      if (t >= 0 && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  return out;
}

// Two states are distinguishable iff some word of length < n separates them.
inline bool distinguishable(const Dfa& d, int p, int q) {
  for (const auto& w : all_words(d.alphabet().size(), std::max(0, d.size() - 1)))
    if (walk(d, w, p) != walk(d, w, q)) return true;
  return false;
}

// Number of Myhill-Nerode classes among reachable states.
inline int nerode_class_count(const Dfa& d) {
  auto states = reachable(d);
  std::vector<int> reps;
  for (int q : states) {
    bool merged = false;
    for (int r : reps)
      if (!distinguishable(d, q, r)) {
        merged = true;
        break;
      }
    if (!merged) reps.push_back(q);
  }
  return static_cast<int>(reps.size());
}

// Table-filling: marked[p][q] iff p and q are distinguishable. Missing
// edges go to an implicit dead state (index n).
inline std::vector<std::vector<bool>> distinguishable_pairs(const Dfa& d) {
  const int n = d.size();
  const auto k = static_cast<rgi::Symbol>(d.alphabet().size());
  const auto next = [&](int q, rgi::Symbol a) {
    if (q == n) return n;
    const int t = d.next(q, a);
    return t < 0 ? n : t;
  };
  const auto acc = [&](int q) { return q < n && d.accepting(q); };
  std::vector<std::vector<bool>> marked(n + 1, std::vector<bool>(n + 1, false));
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) marked[p][q] = acc(p) != acc(q);
  for (bool changed = true; changed;) {
    changed = false;
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q)
        if (!marked[p][q])
          for (rgi::Symbol a = 0; a < k; ++a)
            if (marked[next(p, a)][next(q, a)]) {
              marked[p][q] = true;
              changed = true;
              break;
            }
  }
  return marked;
}

inline Dfa random_dfa(rgi::Rng& rng, int max_states, int max_symbols, double missing_prob = 0.0) {
  const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_symbols)));
  std::vector<std::string> toks;
  for (int i = 0; i < k; ++i) toks.push_back(std::string(1, static_cast<char>('a' + i)));
  Dfa d{Alphabet(toks)};
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_states)));
  for (int q = 0; q < n; ++q) d.add_state(rng.bernoulli(0.4));
  for (int q = 0; q < n; ++q)
    for (int a = 0; a < k; ++a)
      if (!rng.bernoulli(missing_prob)) d.set_next(q, a, static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
  d.set_start(0);
  return d;
}

// Random pattern text over `tokens`, nesting depth <= depth.
inline std::string random_pattern(rgi::Rng& rng, const std::vector<std::string>& tokens, int depth) {
  const auto lit = [&] { return tokens[rng.below(tokens.size())]; };
  if (depth == 0) return lit();
  switch (rng.below(6)) {
    case 0:
      return lit();
    case 1:
    case 2: {
      std::string s;
      const int parts = 2 + static_cast<int>(rng.below(2));
      for (int i = 0; i < parts; ++i) s += (i ? " " : "") + random_pattern(rng, tokens, depth - 1);
      return s;
    }
    case 3: {
      std::string s = "(";
      const int parts = 2 + static_cast<int>(rng.below(2));
      for (int i = 0; i < parts; ++i) s += (i ? "|" : "") + random_pattern(rng, tokens, depth - 1);
      return s + ")";
    }
    case 4:
      return "(" + random_pattern(rng, tokens, depth - 1) + ")*";
    default:
      return "(" + random_pattern(rng, tokens, depth - 1) + ")?";
  }
}

}  // namespace oracle
