#include "rgi/extraction.hpp"

namespace rgi {

StateCollection collect_states(const RnnParams& params, std::span<const Word> strings) {
  if (strings.empty()) throw Error("collect_states: empty string set");
  StateCollection sc;
  sc.alphabet = params.alphabet;
  std::size_t total = 0;
  for (const auto& w : strings) total += w.size();
  sc.points.resize(params.hidden(), static_cast<Eigen::Index>(total));
  sc.provenance.reserve(total);
  std::size_t col = 0;
  for (std::size_t i = 0; i < strings.size(); ++i) {
    const Word& w = strings[i];
    sc.offsets.push_back(col);
    const StateTrace trace = forward(params, w);
    for (std::size_t t = 1; t <= w.size(); ++t) {
      sc.points.col(static_cast<Eigen::Index>(col++)) = trace.states[t];
      sc.provenance.push_back({i, t, w[t - 1]});
    }
    sc.strings.push_back(w);
    sc.predictions.push_back(trace.prediction);
  }
  return sc;
}

StateCollection collect_states(const RnnParams& params, std::span<const LabeledString> strings) {
  std::vector<Word> words;
  words.reserve(strings.size());
  for (const auto& ls : strings) words.push_back(ls.tokens);
  return collect_states(params, words);
}

double ExtractedDfa::transition_conflict_rate() const {
  return traversals == 0 ? 0.0 : static_cast<double>(conflicting_traversals) / static_cast<double>(traversals);
}

double ExtractedDfa::accept_conflict_rate() const {
  return final_visits == 0 ? 0.0 : static_cast<double>(conflicting_finals) / static_cast<double>(final_visits);
}

int ExtractedDfa::accepting_clusters() const {
  int n = 0;
  for (int q = 1; q < dfa.size(); ++q) n += dfa.accepting(q);
  return n;
}

ExtractedDfa build_dfa(const StateCollection& states, const Clustering& clustering) {
  if (clustering.assignment.size() != states.size())
    throw ExtractionError("build_dfa: clustering covers " + std::to_string(clustering.assignment.size()) +
                          " points but the collection has " + std::to_string(states.size()));
  ExtractedDfa ex;
  ex.k = clustering.k;
  ex.dfa = Dfa(states.alphabet);
  const std::size_t alpha = states.alphabet.size();
  const int n_states = clustering.k + 1;
  for (int q = 0; q < n_states; ++q) ex.dfa.add_state(false);
  ex.transition_votes.assign(static_cast<std::size_t>(n_states) * alpha, {});
  ex.accept_votes.assign(static_cast<std::size_t>(n_states), {0, 0});

  for (std::size_t i = 0; i < states.strings.size(); ++i) {
    const Word& w = states.strings[i];
    int prev = ExtractedDfa::kInitialState;
    for (std::size_t t = 1; t <= w.size(); ++t) {
      const int cur = ExtractedDfa::state_of_cluster(clustering.assignment[states.point_index(i, t)]);
      ++ex.transition_votes[static_cast<std::size_t>(prev) * alpha + static_cast<std::size_t>(w[t - 1])][cur];
      prev = cur;
    }
    auto& votes = ex.accept_votes[static_cast<std::size_t>(prev)];
    (states.network_accepts(i) ? votes.second : votes.first)++;
  }

  for (int q = 0; q < n_states; ++q) {
    for (std::size_t a = 0; a < alpha; ++a) {
      const auto& tally = ex.transition_votes[static_cast<std::size_t>(q) * alpha + a];
      int best = Dfa::kNone;
      std::size_t best_n = 0, total = 0;
      for (const auto& [target, n] : tally) {
        total += n;
        if (n > best_n) {
          best_n = n;
          best = target;
        }
      }
      if (best != Dfa::kNone) ex.dfa.set_next(q, static_cast<Symbol>(a), best);
      ex.traversals += total;
      ex.conflicting_traversals += total - best_n;
    }
    const auto [reject, accept] = ex.accept_votes[static_cast<std::size_t>(q)];
    const bool acc = accept > reject;
    ex.dfa.set_accepting(q, acc);
    ex.final_visits += accept + reject;
    ex.conflicting_finals += acc ? reject : accept;
  }
  ex.dfa.set_start(ExtractedDfa::kInitialState);
  return ex;
}

FidelityReport fidelity(const Dfa& dfa, const StateCollection& states, int k) {
  FidelityReport r;
  r.k = k;
  r.total = states.strings.size();
  for (std::size_t i = 0; i < r.total; ++i) {
    if (accepts(dfa, states.strings[i]) == states.network_accepts(i))
      ++r.matches;
    else
      r.disagreements.push_back(i);
  }
  r.match_rate = r.total == 0 ? 0.0 : static_cast<double>(r.matches) / static_cast<double>(r.total);
  return r;
}

FidelityReport fidelity(const Dfa& dfa, const RnnParams& params, std::span<const Word> strings, int k) {
  FidelityReport r;
  r.k = k;
  r.total = strings.size();
  for (std::size_t i = 0; i < r.total; ++i) {
    if (accepts(dfa, strings[i]) == (predict(params, strings[i]) >= 0.5))
      ++r.matches;
    else
      r.disagreements.push_back(i);
  }
  r.match_rate = r.total == 0 ? 0.0 : static_cast<double>(r.matches) / static_cast<double>(r.total);
  return r;
}

Selection select_k(const StateCollection& states, const ExtractionOptions& options) {
  if (options.k_max < 2 || options.k_min < 1 || options.k_min > options.k_max)
    throw Error("select_k: need 1 <= k_min <= k_max and k_max >= 2");
  const std::size_t distinct = distinct_points(states.points);
  std::vector<std::pair<int, double>> curve;
  for (int k = options.k_min; k <= options.k_max; ++k) {
    if (static_cast<std::size_t>(k) > distinct) {
      throw KSelectionError("no K <= " + std::to_string(k - 1) + " reached fidelity " +
                                std::to_string(options.threshold) + " (only " + std::to_string(distinct) +
                                " distinct states)",
                            std::move(curve));
    }
    Selection s;
    s.k = k;
    s.clustering = kmeans_best_of(states.points, k, options.seed, options.restarts);
    s.extracted = build_dfa(states, s.clustering);
    s.fidelity = fidelity(s.extracted.dfa, states, k);
    curve.emplace_back(k, s.fidelity.match_rate);
    if (s.fidelity.match_rate >= options.threshold) {
      s.curve = std::move(curve);
      return s;
    }
  }
  throw KSelectionError("no K in [" + std::to_string(options.k_min) + ", " + std::to_string(options.k_max) +
                            "] reached fidelity " + std::to_string(options.threshold),
                        std::move(curve));
}

Extraction extract(const RnnParams& params, std::span<const LabeledString> strings, const ExtractionOptions& options) {
  Extraction ex;
  ex.states = collect_states(params, strings);
  ex.selection = select_k(ex.states, options);
  ex.raw_completed = complete(ex.selection.extracted.dfa);
  ex.minimized = minimize(ex.raw_completed);
  if (equivalent(ex.minimized, ex.raw_completed))
    throw ExtractionError("internal: minimized automaton differs from the raw automaton");
  return ex;
}

namespace {

nlohmann::ordered_json curve_json(const std::vector<std::pair<int, double>>& curve) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& [k, f] : curve) arr.push_back({{"k", k}, {"fidelity", f}});
  return arr;
}

}  // namespace

nlohmann::ordered_json extraction_report(const Extraction& ex, const ExtractionOptions& options) {
  const auto& sel = ex.selection;
  nlohmann::ordered_json j;
  j["selected_k"] = sel.k;
  j["fidelity_curve"] = curve_json(sel.curve);
  j["fidelity"] = sel.fidelity.match_rate;
  j["transition_conflict_rate"] = sel.extracted.transition_conflict_rate();
  j["accept_conflict_rate"] = sel.extracted.accept_conflict_rate();
  j["raw_state_count"] = sel.extracted.dfa.size();
  j["minimized_state_count"] = ex.minimized.size();
  j["accepting_clusters"] = sel.extracted.accepting_clusters();
  j["collected_states"] = ex.states.size();
  j["distinct_states"] = distinct_points(ex.states.points);
  j["threshold"] = options.threshold;
  j["k_max"] = options.k_max;
  j["restarts"] = options.restarts;
  j["fidelity_strings"] = "validation";
  return j;
}

nlohmann::ordered_json failed_extraction_report(const KSelectionError& error, const ExtractionOptions& options) {
  nlohmann::ordered_json j;
  j["selected_k"] = nullptr;
  j["fidelity_curve"] = curve_json(error.curve());
  j["error"] = error.what();
  j["threshold"] = options.threshold;
  j["k_max"] = options.k_max;
  j["restarts"] = options.restarts;
  return j;
}

}  // namespace rgi
