#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rgi/datagen.hpp"
#include "rgi/dfa.hpp"
#include "rgi/extraction.hpp"
#include "rgi/rnn.hpp"

namespace rgi {

// --- cycles ---

struct CyclePair {
  std::size_t t1 = 0;
  std::size_t t2 = 0;
  double distance = 0.0;
  bool exact = false;  // bitwise-equal vectors
};

struct StringCycles {
  std::size_t string_index = 0;
  std::vector<CyclePair> pairs;
};

struct CycleReport {
  double epsilon = 0.0;
  std::size_t strings = 0;
  std::size_t states = 0;
  std::size_t strings_with_repeats = 0;
  std::size_t exact_repeats = 0;
  std::size_t epsilon_repeats = 0;  // 0 < distance <= epsilon
  std::vector<StringCycles> per_string;  // strings with at least one pair
};

inline constexpr double kDefaultCycleEpsilon = 1e-6;

// All pairs t1 < t2 (t = 0 is s_0) within each trace at Euclidean distance
// <= epsilon.
CycleReport detect_cycles(std::span<const StateTrace> traces, double epsilon = kDefaultCycleEpsilon);

// `max_listed` bounds the number of per-string entries written out; the
// aggregate counts always cover everything.
nlohmann::ordered_json cycle_report_json(const CycleReport& report, std::size_t max_listed = 1000);

// --- PCA ---

struct Pca {
  Eigen::VectorXd mean;          // H
  Eigen::MatrixXd components;    // H x d, orthonormal columns
  Eigen::VectorXd eigenvalues;   // d, descending (1/N covariance)
  Eigen::VectorXd ratios;        // explained variance ratios
  Eigen::MatrixXd projection;    // d x N
  bool degenerate = false;       // all points identical

  Eigen::VectorXd project(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

// Columns of `points` are samples. Each component's largest-magnitude
// coordinate is made positive.
Pca pca_project(const Eigen::MatrixXd& points, int out_dims = 2);

// "x,y,cluster_id,is_final,network_decision", one row per collected state.
// network_decision is the network's output read at that state.
std::string pca_csv(const Pca& pca, const StateCollection& states, const Clustering& clustering,
                    const RnnParams& params);

// Scatter plot: clusters coloured, points of accepting clusters outlined,
// s_0 drawn as a separate marker.
std::string pca_svg(const Pca& pca, const StateCollection& states, const Clustering& clustering,
                    const ExtractedDfa& extracted, const RnnParams& params);

// Per cluster: accept/reject network decisions of strings ending there.
nlohmann::ordered_json cluster_decision_report(const StateCollection& states, const Clustering& clustering);

// --- errors ---

struct ErrorReport {
  std::size_t test_total = 0;
  std::size_t test_correct = 0;
  double test_accuracy = 0.0;
  Dfa difference;  // accepts L(extracted) xor L(truth)
  std::vector<Word> false_accepts;  // extracted accepts, truth rejects
  std::vector<Word> false_rejects;
  bool false_accepts_truncated = false;
  bool false_rejects_truncated = false;
  int max_length = 0;
};

inline constexpr int kDefaultErrorLength = 12;
inline constexpr std::size_t kDefaultErrorCap = 1000;

// Test-set accuracy of `extracted` against the labels, plus every
// disagreement up to max_length, in length-then-lex order, at most
// max_per_class each. Both automata are completed; the alphabets must hold
// the same tokens and words are in extracted's numbering.
ErrorReport mine_errors(const Dfa& extracted, const Dfa& truth, std::span<const LabeledString> test,
                        int max_length = kDefaultErrorLength, std::size_t max_per_class = kDefaultErrorCap);

nlohmann::ordered_json error_report_json(const ErrorReport& report, const Alphabet& alphabet);

// --- pumping ---

struct Augmentation {
  Word base;
  Word prefix, infix, suffix;
  std::size_t t1 = 0, t2 = 0;  // repeated state positions in the run
  std::vector<LabeledString> variants;  // labelled by truth
};

class NotPumpableError : public Error {
 public:
  using Error::Error;
};

// Variants prefix . infix^i . suffix for i = 0, 2, 3, ... that extracted
// still misclassifies, until `count` are found (or the attempts run out).
Augmentation pump_errors(const Dfa& extracted, const Dfa& truth, const Word& base, std::size_t count);

// Pumps each listed error (skipping the unpumpable ones); variants are
// deduplicated across bases.
std::vector<Augmentation> augment(const Dfa& extracted, const Dfa& truth, const ErrorReport& errors,
                                  std::size_t per_base, std::size_t max_bases);

}  // namespace rgi
