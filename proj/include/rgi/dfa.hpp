#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgi/alphabet.hpp"
#include "rgi/nfa.hpp"

namespace rgi {

// Deterministic automaton over an ordered token alphabet. States are
// 0..size()-1; a transition may be missing (partial DFA), in which case the
// run rejects.
class Dfa {
 public:
  static constexpr int kNone = -1;

  Dfa() = default;
  explicit Dfa(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int size() const noexcept { return static_cast<int>(accepting_.size()); }
  int start() const noexcept { return start_; }
  void set_start(int q) { start_ = q; }

  int add_state(bool accepting = false);
  bool accepting(int q) const { return accepting_.at(static_cast<std::size_t>(q)); }
  void set_accepting(int q, bool value) { accepting_.at(static_cast<std::size_t>(q)) = value; }

  int next(int q, Symbol a) const { return delta_[index(q, a)]; }
  void set_next(int q, Symbol a, int target) { delta_[index(q, a)] = target; }

  bool is_complete() const noexcept;
  std::vector<int> accept_states() const;

  // End state of the run, or nullopt if it falls off a missing transition.
  std::optional<int> run(const Word& word) const;

  friend bool operator==(const Dfa&, const Dfa&) = default;

 private:
  std::size_t index(int q, Symbol a) const {
    return static_cast<std::size_t>(q) * alphabet_.size() + static_cast<std::size_t>(a);
  }

  Alphabet alphabet_;
  int start_ = 0;
  std::vector<bool> accepting_;
  std::vector<int> delta_;
};

inline constexpr std::size_t kDefaultSubsetBudget = 1'000'000;

// Subset construction. The result is complete; the empty subset becomes a
// non-accepting sink which, when needed, is the last state.
Dfa determinize(const Nfa& nfa, std::size_t max_states = kDefaultSubsetBudget);

// Convenience: parse, compile and determinize.
Dfa regex_to_dfa(std::string_view pattern, const Alphabet& alphabet);

// Routes missing transitions to a fresh non-accepting sink (appended last).
// A DFA that is already complete is returned unchanged.
Dfa complete(const Dfa& dfa);

// Drops states unreachable from the start, keeping the relative order of the
// survivors.
Dfa prune_unreachable(const Dfa& dfa);

// Hopcroft partition refinement on a complete DFA. Output states are numbered
// in breadth-first order from the start (alphabet order), with the dead state,
// if any, last.
Dfa minimize(const Dfa& dfa);

// Throws UnknownTokenError for tokens outside the alphabet.
bool accepts(const Dfa& dfa, const Word& word);
bool accepts(const Dfa& dfa, const std::vector<std::string>& tokens);

// Shortest string (ties broken by alphabet order) accepted by exactly one of
// the automata, or nullopt if they are equivalent. Both must be over the same
// token set; the returned word uses a's symbol numbering. Missing
// transitions count as rejecting.
std::optional<Word> equivalent(const Dfa& a, const Dfa& b);

// Product automaton (reachable part) accepting where op(in_a, in_b) holds.
// Uses a's alphabet order; partial inputs are completed first.
Dfa product(const Dfa& a, const Dfa& b, const std::function<bool(bool, bool)>& op);
Dfa symmetric_difference(const Dfa& a, const Dfa& b);

inline constexpr int kMaxEnumerateLength = 16;

// Every string of length 0..max_len in length-then-lex order with its
// membership flag.
std::vector<std::pair<Word, bool>> enumerate_strings(const Dfa& dfa, int max_len);

// Number of strings of exactly `length` the DFA accepts, as a double.
double count_accepted(const Dfa& dfa, int length);

// Text transition table: "# alphabet", "# states", "# start", "# accepts"
// header lines, then one "state TAB token TAB state" line per edge. A "# meta"
// line is ignored by the reader.
std::string write_table(const Dfa& dfa);
Dfa read_table(std::string_view text, std::string_view source = "<table>");

// Re-expresses `dfa` over `target` (same token set, possibly different order).
Dfa reorder_alphabet(const Dfa& dfa, const Alphabet& target);

}  // namespace rgi
