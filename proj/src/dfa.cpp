#include "rgi/dfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>

#include "rgi/error.hpp"
#include "rgi/regex.hpp"

namespace rgi {

int Dfa::add_state(bool accepting) {
  accepting_.push_back(accepting);
  delta_.resize(delta_.size() + alphabet_.size(), kNone);
  return size() - 1;
}

bool Dfa::is_complete() const noexcept {
  return std::none_of(delta_.begin(), delta_.end(), [](int t) { return t == kNone; });
}

std::vector<int> Dfa::accept_states() const {
  std::vector<int> out;
  for (int q = 0; q < size(); ++q)
    if (accepting_[static_cast<std::size_t>(q)]) out.push_back(q);
  return out;
}

std::optional<int> Dfa::run(const Word& word) const {
  if (size() == 0) return std::nullopt;
  int q = start_;
  for (Symbol a : word) {
    if (a < 0 || static_cast<std::size_t>(a) >= alphabet_.size())
      throw UnknownTokenError("#" + std::to_string(a));
    q = next(q, a);
    if (q == kNone) return std::nullopt;
  }
  return q;
}

// --- subset construction ---------------------------------------------------

Dfa determinize(const Nfa& nfa, std::size_t max_states) {
  const std::size_t k = nfa.alphabet.size();
  // Subsets are identified by their "important" members: states with a
  // symbol move or accepting. Closures that agree there behave identically.
  std::vector<bool> important(static_cast<std::size_t>(nfa.size()), false);
  for (int s = 0; s < nfa.size(); ++s) {
    bool imp = nfa.accepting[static_cast<std::size_t>(s)];
    for (const auto& e : nfa.edges[static_cast<std::size_t>(s)]) imp = imp || e.symbol != kEpsilon;
    important[static_cast<std::size_t>(s)] = imp;
  }
  auto key_of = [&](const std::vector<int>& closure) {
    std::vector<int> key;
    for (int s : closure)
      if (important[static_cast<std::size_t>(s)]) key.push_back(s);
    return key;
  };

  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> subsets;
  std::vector<std::vector<int>> table;  // subset -> per symbol target subset (-1 = empty)

  auto intern = [&](std::vector<int> key) -> int {
    if (key.empty()) return -1;
    auto [it, inserted] = ids.emplace(key, static_cast<int>(subsets.size()));
    if (inserted) {
      if (subsets.size() + 1 > max_states)
        throw BudgetError("subset construction exceeded " + std::to_string(max_states) + " states");
      subsets.push_back(std::move(key));
    }
    return it->second;
  };

  intern(key_of(epsilon_closure(nfa, {nfa.start})));
  bool need_sink = subsets.empty();
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::vector<int> row(k, -1);
    for (std::size_t a = 0; a < k; ++a) {
      std::vector<int> moved;
      for (int s : subsets[i])
        for (const auto& e : nfa.edges[static_cast<std::size_t>(s)])
          if (e.symbol == static_cast<Symbol>(a)) moved.push_back(e.target);
      row[a] = intern(key_of(epsilon_closure(nfa, std::move(moved))));
      need_sink = need_sink || row[a] < 0;
    }
    table.push_back(std::move(row));
  }

  Dfa dfa(nfa.alphabet);
  for (const auto& key : subsets) {
    bool acc = std::any_of(key.begin(), key.end(),
                           [&](int s) { return nfa.accepting[static_cast<std::size_t>(s)]; });
    dfa.add_state(acc);
  }
  const int sink = need_sink ? dfa.add_state(false) : -1;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t a = 0; a < k; ++a)
      dfa.set_next(static_cast<int>(i), static_cast<Symbol>(a), table[i][a] < 0 ? sink : table[i][a]);
  if (need_sink)
    for (std::size_t a = 0; a < k; ++a) dfa.set_next(sink, static_cast<Symbol>(a), sink);
  dfa.set_start(0);
  return dfa;
}

Dfa regex_to_dfa(std::string_view pattern, const Alphabet& alphabet) {
  return determinize(compile_nfa(parse_regex(pattern, alphabet)));
}

// --- completion / pruning ---------------------------------------------------

Dfa complete(const Dfa& dfa) {
  if (dfa.size() > 0 && dfa.is_complete()) return dfa;
  Dfa out = dfa;
  if (out.size() == 0) {
    out.set_start(out.add_state(false));
  }
  const int sink = out.add_state(false);
  const auto k = static_cast<Symbol>(out.alphabet().size());
  for (int q = 0; q < out.size(); ++q)
    for (Symbol a = 0; a < k; ++a)
      if (out.next(q, a) == Dfa::kNone) out.set_next(q, a, sink);
  return out;
}

Dfa prune_unreachable(const Dfa& dfa) {
  if (dfa.size() == 0) return dfa;
  const auto k = static_cast<Symbol>(dfa.alphabet().size());
  std::vector<bool> seen(static_cast<std::size_t>(dfa.size()), false);
  std::vector<int> stack{dfa.start()};
  seen[static_cast<std::size_t>(dfa.start())] = true;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (Symbol a = 0; a < k; ++a) {
      int t = dfa.next(q, a);
      if (t != Dfa::kNone && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  std::vector<int> remap(static_cast<std::size_t>(dfa.size()), -1);
  Dfa out(dfa.alphabet());
  for (int q = 0; q < dfa.size(); ++q)
    if (seen[static_cast<std::size_t>(q)]) remap[static_cast<std::size_t>(q)] = out.add_state(dfa.accepting(q));
  for (int q = 0; q < dfa.size(); ++q) {
    if (!seen[static_cast<std::size_t>(q)]) continue;
    for (Symbol a = 0; a < k; ++a) {
      int t = dfa.next(q, a);
      if (t != Dfa::kNone) out.set_next(remap[static_cast<std::size_t>(q)], a, remap[static_cast<std::size_t>(t)]);
    }
  }
  out.set_start(remap[static_cast<std::size_t>(dfa.start())]);
  return out;
}

// --- minimization -------------------------------------------------------------

Dfa minimize(const Dfa& input) {
  if (input.size() == 0 || !input.is_complete())
    throw Error("minimize requires a complete DFA; call complete() first");
  const Dfa dfa = prune_unreachable(input);
  const int n = dfa.size();
  const int k = static_cast<int>(dfa.alphabet().size());

  // Predecessor lists in CSR form, per symbol.
  std::vector<std::vector<int>> pred_start(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(n) + 1, 0));
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < k; ++a) {
    auto& ps = pred_start[static_cast<std::size_t>(a)];
    for (int q = 0; q < n; ++q) ++ps[static_cast<std::size_t>(dfa.next(q, a)) + 1];
    for (int q = 0; q < n; ++q) ps[static_cast<std::size_t>(q) + 1] += ps[static_cast<std::size_t>(q)];
    std::vector<int> fill(ps.begin(), ps.end() - 1);
    for (int q = 0; q < n; ++q)
      pred[static_cast<std::size_t>(a)][static_cast<std::size_t>(fill[static_cast<std::size_t>(dfa.next(q, a))]++)] = q;
  }

  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of(static_cast<std::size_t>(n));
  {
    std::vector<int> acc, rej;
    for (int q = 0; q < n; ++q) (dfa.accepting(q) ? acc : rej).push_back(q);
    for (auto* part : {&acc, &rej}) {
      if (part->empty()) continue;
      for (int q : *part) block_of[static_cast<std::size_t>(q)] = static_cast<int>(blocks.size());
      blocks.push_back(std::move(*part));
    }
  }

  std::vector<std::vector<bool>> in_work;  // [block][symbol]
  std::deque<std::pair<int, int>> work;
  auto push = [&](int b, int a) {
    if (in_work[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)]) return;
    in_work[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
    work.emplace_back(b, a);
  };
  in_work.assign(blocks.size(), std::vector<bool>(static_cast<std::size_t>(k), false));
  if (blocks.size() == 2) {
    const int smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
    for (int a = 0; a < k; ++a) push(smaller, a);
  }

  std::vector<bool> marked(static_cast<std::size_t>(n), false);
  std::vector<int> touched_count;
  std::vector<int> touched;
  std::vector<int> marked_list;
  while (!work.empty()) {
    auto [splitter, a] = work.front();
    work.pop_front();
    in_work[static_cast<std::size_t>(splitter)][static_cast<std::size_t>(a)] = false;

    touched.clear();
    marked_list.clear();
    touched_count.assign(blocks.size(), 0);
    const auto& ps = pred_start[static_cast<std::size_t>(a)];
    const auto& pl = pred[static_cast<std::size_t>(a)];
    for (int t : blocks[static_cast<std::size_t>(splitter)]) {
      for (int i = ps[static_cast<std::size_t>(t)]; i < ps[static_cast<std::size_t>(t) + 1]; ++i) {
        const int q = pl[static_cast<std::size_t>(i)];
        if (marked[static_cast<std::size_t>(q)]) continue;
        marked[static_cast<std::size_t>(q)] = true;
        marked_list.push_back(q);
        const int b = block_of[static_cast<std::size_t>(q)];
        if (touched_count[static_cast<std::size_t>(b)]++ == 0) touched.push_back(b);
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int b : touched) {
      auto& members = blocks[static_cast<std::size_t>(b)];
      if (touched_count[static_cast<std::size_t>(b)] == static_cast<int>(members.size())) continue;
      std::vector<int> in, out;
      for (int q : members) (marked[static_cast<std::size_t>(q)] ? in : out).push_back(q);
      const int nb = static_cast<int>(blocks.size());
      members = std::move(out);
      for (int q : in) block_of[static_cast<std::size_t>(q)] = nb;
      blocks.push_back(std::move(in));
      in_work.emplace_back(static_cast<std::size_t>(k), false);
      const bool new_smaller = blocks.back().size() <= blocks[static_cast<std::size_t>(b)].size();
      for (int c = 0; c < k; ++c) {
        if (in_work[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)])
          push(nb, c);
        else
          push(new_smaller ? nb : b, c);
      }
    }
    for (int q : marked_list) marked[static_cast<std::size_t>(q)] = false;
  }

  // Quotient automaton over blocks.
  const int nblocks = static_cast<int>(blocks.size());
  auto rep = [&](int b) { return blocks[static_cast<std::size_t>(b)].front(); };
  // Dead blocks: no accepting block reachable.
  std::vector<bool> live(static_cast<std::size_t>(nblocks), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (int b = 0; b < nblocks; ++b) {
      if (live[static_cast<std::size_t>(b)]) continue;
      bool l = dfa.accepting(rep(b));
      for (int a = 0; a < k && !l; ++a) l = live[static_cast<std::size_t>(block_of[static_cast<std::size_t>(dfa.next(rep(b), a))])];
      if (l) {
        live[static_cast<std::size_t>(b)] = true;
        changed = true;
      }
    }
  }
  std::vector<int> order;
  std::vector<int> id(static_cast<std::size_t>(nblocks), -1);
  std::deque<int> queue{block_of[static_cast<std::size_t>(dfa.start())]};
  id[static_cast<std::size_t>(queue.front())] = 0;
  order.push_back(queue.front());
  while (!queue.empty()) {
    int b = queue.front();
    queue.pop_front();
    for (int a = 0; a < k; ++a) {
      int t = block_of[static_cast<std::size_t>(dfa.next(rep(b), a))];
      if (id[static_cast<std::size_t>(t)] < 0) {
        id[static_cast<std::size_t>(t)] = static_cast<int>(order.size());
        order.push_back(t);
        queue.push_back(t);
      }
    }
  }
  // Move the dead block (at most one) to the end.
  std::stable_partition(order.begin(), order.end(), [&](int b) { return live[static_cast<std::size_t>(b)]; });
  for (std::size_t i = 0; i < order.size(); ++i) id[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

  Dfa out(dfa.alphabet());
  for (int b : order) out.add_state(dfa.accepting(rep(b)));
  for (int b : order)
    for (int a = 0; a < k; ++a)
      out.set_next(id[static_cast<std::size_t>(b)], a,
                   id[static_cast<std::size_t>(block_of[static_cast<std::size_t>(dfa.next(rep(b), a))])]);
  out.set_start(id[static_cast<std::size_t>(block_of[static_cast<std::size_t>(dfa.start())])]);
  return out;
}

// --- membership / comparison -------------------------------------------------

bool accepts(const Dfa& dfa, const Word& word) {
  auto end = dfa.run(word);
  return end && dfa.accepting(*end);
}

bool accepts(const Dfa& dfa, const std::vector<std::string>& tokens) {
  return accepts(dfa, dfa.alphabet().encode(tokens));
}

Dfa reorder_alphabet(const Dfa& dfa, const Alphabet& target) {
  if (dfa.alphabet() == target) return dfa;
  if (dfa.alphabet().size() != target.size())
    throw Error("alphabet mismatch: {" + dfa.alphabet().join() + "} vs {" + target.join() + "}");
  std::vector<Symbol> from_target(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    auto s = dfa.alphabet().find(target.tokens()[i]);
    if (!s) throw Error("alphabet mismatch: {" + dfa.alphabet().join() + "} vs {" + target.join() + "}");
    from_target[i] = *s;
  }
  Dfa out(target);
  for (int q = 0; q < dfa.size(); ++q) out.add_state(dfa.accepting(q));
  for (int q = 0; q < dfa.size(); ++q)
    for (std::size_t i = 0; i < target.size(); ++i) out.set_next(q, static_cast<Symbol>(i), dfa.next(q, from_target[i]));
  out.set_start(dfa.start());
  return out;
}

namespace {

// Product exploration shared by equivalent() and product(). Missing
// transitions map to the virtual dead state -1.
struct PairHash {
  std::size_t operator()(const std::pair<int, int>& p) const noexcept {
    return std::hash<long long>()((static_cast<long long>(p.first) << 32) ^ static_cast<unsigned>(p.second));
  }
};

int step(const Dfa& d, int q, Symbol a) { return q < 0 ? -1 : d.next(q, a); }
bool acc(const Dfa& d, int q) { return q >= 0 && d.accepting(q); }
int start_of(const Dfa& d) { return d.size() == 0 ? -1 : d.start(); }

}  // namespace

std::optional<Word> equivalent(const Dfa& a, const Dfa& b_in) {
  const Dfa b = reorder_alphabet(b_in, a.alphabet());
  const int k = static_cast<int>(a.alphabet().size());
  using P = std::pair<int, int>;
  std::unordered_map<P, std::pair<P, Symbol>, PairHash> parent;
  std::deque<P> queue;
  const P root{start_of(a), start_of(b)};
  auto path_to = [&](P p) {
    Word w;
    while (p != root) {
      auto [prev, sym] = parent.at(p);
      w.push_back(sym);
      p = prev;
    }
    std::reverse(w.begin(), w.end());
    return w;
  };
  if (acc(a, root.first) != acc(b, root.second)) return Word{};
  parent.emplace(root, std::make_pair(root, -1));
  queue.push_back(root);
  while (!queue.empty()) {
    P p = queue.front();
    queue.pop_front();
    for (Symbol s = 0; s < k; ++s) {
      P t{step(a, p.first, s), step(b, p.second, s)};
      if (parent.count(t)) continue;
      parent.emplace(t, std::make_pair(p, s));
      if (acc(a, t.first) != acc(b, t.second)) return path_to(t);
      queue.push_back(t);
    }
  }
  return std::nullopt;
}

Dfa product(const Dfa& a, const Dfa& b_in, const std::function<bool(bool, bool)>& op) {
  const Dfa b = reorder_alphabet(b_in, a.alphabet());
  const int k = static_cast<int>(a.alphabet().size());
  using P = std::pair<int, int>;
  std::unordered_map<P, int, PairHash> ids;
  std::vector<P> pairs;
  Dfa out(a.alphabet());
  auto intern = [&](P p) {
    auto [it, inserted] = ids.emplace(p, static_cast<int>(pairs.size()));
    if (inserted) {
      pairs.push_back(p);
      out.add_state(op(acc(a, p.first), acc(b, p.second)));
    }
    return it->second;
  };
  intern({start_of(a), start_of(b)});
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (Symbol s = 0; s < k; ++s) {
      const P p = pairs[i];
      const int t = intern({step(a, p.first, s), step(b, p.second, s)});
      out.set_next(static_cast<int>(i), s, t);
    }
  }
  out.set_start(0);
  return out;
}

Dfa symmetric_difference(const Dfa& a, const Dfa& b) {
  return product(a, b, [](bool x, bool y) { return x != y; });
}

std::vector<std::pair<Word, bool>> enumerate_strings(const Dfa& dfa, int max_len) {
  if (max_len < 0 || max_len > kMaxEnumerateLength)
    throw Error("enumerate_strings: max_len must be in [0, " + std::to_string(kMaxEnumerateLength) + "]");
  const std::size_t k = dfa.alphabet().size();
  double total = 0, layer = 1;
  for (int l = 0; l <= max_len; ++l, layer *= static_cast<double>(k)) total += layer;
  if (total > static_cast<double>(1u << 26)) throw Error("enumerate_strings: too many strings requested");

  std::vector<std::pair<Word, bool>> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int len = 0; len <= max_len; ++len) {
    Word w(static_cast<std::size_t>(len), 0);
    for (;;) {
      out.emplace_back(w, accepts(dfa, w));
      int i = len - 1;
      while (i >= 0 && static_cast<std::size_t>(w[static_cast<std::size_t>(i)]) + 1 == k) w[static_cast<std::size_t>(i--)] = 0;
      if (i < 0 || k == 0) break;
      ++w[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

double count_accepted(const Dfa& dfa, int length) {
  if (dfa.size() == 0) return 0;
  std::vector<double> ways(static_cast<std::size_t>(dfa.size()), 0.0);
  ways[static_cast<std::size_t>(dfa.start())] = 1.0;
  const auto k = static_cast<Symbol>(dfa.alphabet().size());
  for (int l = 0; l < length; ++l) {
    std::vector<double> next(ways.size(), 0.0);
    for (int q = 0; q < dfa.size(); ++q) {
      if (ways[static_cast<std::size_t>(q)] == 0) continue;
      for (Symbol a = 0; a < k; ++a) {
        int t = dfa.next(q, a);
        if (t != Dfa::kNone) next[static_cast<std::size_t>(t)] += ways[static_cast<std::size_t>(q)];
      }
    }
    ways = std::move(next);
  }
  double total = 0;
  for (int q = 0; q < dfa.size(); ++q)
    if (dfa.accepting(q)) total += ways[static_cast<std::size_t>(q)];
  return total;
}

// --- table format -------------------------------------------------------------

std::string write_table(const Dfa& dfa) {
  std::ostringstream os;
  os << "# alphabet";
  for (const auto& t : dfa.alphabet().tokens()) os << ' ' << t;
  os << "\n# states " << dfa.size() << "\n# start " << dfa.start() << "\n# accepts";
  for (int q : dfa.accept_states()) os << ' ' << q;
  os << '\n';
  const auto k = static_cast<Symbol>(dfa.alphabet().size());
  for (int q = 0; q < dfa.size(); ++q)
    for (Symbol a = 0; a < k; ++a)
      if (int t = dfa.next(q, a); t != Dfa::kNone) os << q << '\t' << dfa.alphabet().token(a) << '\t' << t << '\n';
  return os.str();
}

Dfa read_table(std::string_view text, std::string_view source) {
  const std::string src(source);
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  std::optional<Alphabet> alphabet;
  int states = -1, start = -1;
  std::vector<int> accepts_list;
  bool have_accepts = false;
  std::optional<Dfa> dfa;
  auto parse_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError(src, lineno, "expected integer, got '" + s + "'");
    }
  };
  auto ensure_dfa = [&]() -> Dfa& {
    if (!dfa) {
      if (!alphabet || states < 0 || start < 0 || !have_accepts)
        throw ParseError(src, lineno, "edge before complete header");
      dfa.emplace(*alphabet);
      for (int q = 0; q < states; ++q) dfa->add_state(false);
      if (start >= states) throw ParseError(src, lineno, "start state out of range");
      dfa->set_start(start);
      for (int q : accepts_list) {
        if (q < 0 || q >= states) throw ParseError(src, lineno, "accept state out of range");
        dfa->set_accepting(q, true);
      }
    }
    return *dfa;
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto words = split_words(std::string_view(line).substr(1));
      if (words.empty()) continue;
      const std::string key = words.front();
      words.erase(words.begin());
      if (key == "alphabet") {
        alphabet.emplace(words);
      } else if (key == "states" && words.size() == 1) {
        states = parse_int(words[0]);
      } else if (key == "start" && words.size() == 1) {
        start = parse_int(words[0]);
      } else if (key == "accepts") {
        have_accepts = true;
        for (const auto& w : words) accepts_list.push_back(parse_int(w));
      } else if (key == "meta") {
        // free-form provenance line
      } else {
        throw ParseError(src, lineno, "unknown header '" + key + "'");
      }
      continue;
    }
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      auto tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 3) throw ParseError(src, lineno, "expected 'state<TAB>token<TAB>state'");
    Dfa& d = ensure_dfa();
    const int from = parse_int(fields[0]), to = parse_int(fields[2]);
    if (from < 0 || from >= states || to < 0 || to >= states) throw ParseError(src, lineno, "state out of range");
    auto sym = d.alphabet().find(fields[1]);
    if (!sym) throw ParseError(src, lineno, "unknown token '" + fields[1] + "'");
    if (d.next(from, *sym) != Dfa::kNone) throw ParseError(src, lineno, "duplicate edge");
    d.set_next(from, *sym, to);
  }
  return ensure_dfa();
}

}  // namespace rgi
