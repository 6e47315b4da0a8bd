#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rgi/dfa.hpp"
#include "rgi/error.hpp"
#include "rgi/kmeans.hpp"
#include "rgi/rnn.hpp"

namespace rgi {

// Hidden states s_t (t >= 1) of every string, as columns.
struct StateCollection {
  struct Provenance {
    std::size_t string_index;
    std::size_t position;  // t >= 1
    Symbol symbol;         // x_t
  };

  Alphabet alphabet;
  Eigen::MatrixXd points;  // H x N
  std::vector<Provenance> provenance;
  std::vector<Word> strings;
  std::vector<double> predictions;   // network output per string
  std::vector<std::size_t> offsets;  // first point of each string

  std::size_t size() const noexcept { return provenance.size(); }
  // Column of s_t for string i (t >= 1).
  std::size_t point_index(std::size_t string_index, std::size_t t) const { return offsets[string_index] + t - 1; }
  bool network_accepts(std::size_t string_index) const { return predictions[string_index] >= 0.5; }
};

StateCollection collect_states(const RnnParams& params, std::span<const Word> strings);
StateCollection collect_states(const RnnParams& params, std::span<const LabeledString> strings);

// Automaton replayed from a clustering. State 0 is the network's initial
// state s_0 (never clustered); state i+1 is cluster i. Edges and accept flags
// are decided by vote.
struct ExtractedDfa {
  Dfa dfa;  // partial
  int k = 0;
  // (state * |alphabet| + symbol) -> target state -> traversal count
  std::vector<std::map<int, std::size_t>> transition_votes;
  // per state: {reject count, accept count} of strings ending there
  std::vector<std::pair<std::size_t, std::size_t>> accept_votes;
  std::size_t traversals = 0;
  std::size_t conflicting_traversals = 0;
  std::size_t final_visits = 0;
  std::size_t conflicting_finals = 0;

  static int state_of_cluster(int cluster) { return cluster + 1; }
  static constexpr int kInitialState = 0;

  double transition_conflict_rate() const;
  double accept_conflict_rate() const;
  // Number of clusters (excluding the initial state) marked accepting.
  int accepting_clusters() const;
};

// Replays every collected string through the clustering: each s_{t-1} -> s_t
// step votes for an edge between their states, and each string's final
// state receives an accept or reject vote from the network's decision.
// Edges take the most-voted target (lowest state id on ties); a state accepts
// when accept votes strictly outnumber reject votes.
ExtractedDfa build_dfa(const StateCollection& states, const Clustering& clustering);

struct FidelityReport {
  int k = 0;
  double match_rate = 0.0;
  std::size_t matches = 0;
  std::size_t total = 0;
  std::vector<std::size_t> disagreements;  // string indices
};

// Agreement between the automaton (missing edge rejects) and the network.
FidelityReport fidelity(const Dfa& dfa, const StateCollection& states, int k = 0);
FidelityReport fidelity(const Dfa& dfa, const RnnParams& params, std::span<const Word> strings, int k = 0);

struct ExtractionOptions {
  double threshold = 0.99;
  int k_min = 2;
  int k_max = 50;
  int restarts = 5;
  std::uint64_t seed = 42;
};

struct Selection {
  int k = 0;
  Clustering clustering;
  ExtractedDfa extracted;
  FidelityReport fidelity;
  std::vector<std::pair<int, double>> curve;  // (K, fidelity) for every K tried
};

class KSelectionError : public ExtractionError {
 public:
  KSelectionError(const std::string& what, std::vector<std::pair<int, double>> curve)
      : ExtractionError(what), curve_(std::move(curve)) {}
  const std::vector<std::pair<int, double>>& curve() const noexcept { return curve_; }

 private:
  std::vector<std::pair<int, double>> curve_;
};

// Smallest K in [k_min, k_max] whose automaton matches the network on at
// least `threshold` of the collected strings.
Selection select_k(const StateCollection& states, const ExtractionOptions& options);

struct Extraction {
  StateCollection states;
  Selection selection;
  Dfa raw_completed;
  Dfa minimized;
};

// collect -> select_k -> complete -> minimize.
Extraction extract(const RnnParams& params, std::span<const LabeledString> strings, const ExtractionOptions& options);

// Report object: selected_k, fidelity_curve, conflict rates, state counts.
nlohmann::ordered_json extraction_report(const Extraction& extraction, const ExtractionOptions& options);
nlohmann::ordered_json failed_extraction_report(const KSelectionError& error, const ExtractionOptions& options);

}  // namespace rgi
