#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rgi/alphabet.hpp"
#include "rgi/dfa.hpp"
#include "rgi/regex.hpp"
#include "rgi/rng.hpp"

namespace rgi {

enum class Origin { Positive, RandomNegative, PerturbedNegative };
enum class NegativeMethod { Random, Perturb };
enum class DedupPolicy { None, WithinSplit };

std::string to_string(NegativeMethod m);
NegativeMethod parse_negative_method(std::string_view s);
std::string to_string(DedupPolicy d);
DedupPolicy parse_dedup_policy(std::string_view s);

struct LabeledString {
  Word tokens;
  int label = 0;  // 1 iff the string is in the language
  Origin origin = Origin::Positive;

  friend bool operator==(const LabeledString&, const LabeledString&) = default;
};

using Split = std::vector<LabeledString>;

struct GenConfig {
  std::size_t train_size = 15'000;
  std::size_t validation_size = 10'000;
  std::size_t test_size = 10'000;
  NegativeMethod method = NegativeMethod::Random;
  double star_p = 0.5;  // probability of one more star repetition
  int max_len = 30;
  DedupPolicy dedup = DedupPolicy::None;
  std::uint64_t seed = 42;

  void validate() const;
  friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

struct Dataset {
  Split train;
  Split validation;
  Split test;
  std::string regex;
  Alphabet alphabet;
  std::uint64_t seed = 0;
  GenConfig config;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

inline constexpr int kSampleBudget = 10'000;

// Random walk over the regex tree: a star repeats i times with probability
// (1-p) p^i, alternation branches are uniform, optionals are taken with
// probability 1/2. Draws longer than max_len are rejected and redrawn. The
// result is checked against `truth`.
Word sample_positive(const RegexAst& ast, const Dfa& truth, Rng& rng, double p, int max_len,
                     int budget = kSampleBudget);

// Uniform string of exactly `length` tokens that `truth` rejects.
Word sample_negative_random(const Alphabet& alphabet, int length, const Dfa& truth, Rng& rng,
                            int budget = kSampleBudget);

struct Edit {
  enum class Kind { Delete, Insert, Move };
  Kind kind;
  std::size_t from = 0;  // Delete/Move: index removed
  std::size_t to = 0;    // Insert/Move: insertion index after removal
  Symbol symbol = 0;     // Insert only
};

Word apply_edit(Word word, const Edit& edit);
Edit random_edit(const Word& word, std::size_t alphabet_size, Rng& rng);

// One to three random edits of an accepted string, redrawn until `truth`
// rejects the result.
Word sample_negative_perturb(const Word& positive, const Dfa& truth, Rng& rng, int budget = kSampleBudget);

// Balanced splits (positives = ceil(n/2)). Random negatives take their
// lengths from a resample of the same split's positive lengths. Each split
// uses its own seed derived from config.seed and the split name.
Dataset generate_dataset(std::string_view regex, const Alphabet& alphabet, const GenConfig& config);

// Number of stored labels that disagree with `truth`.
std::size_t audit_labels(const Dataset& dataset, const Dfa& truth);

// --- persistence ---

// "# regex=<pattern> seed=<n> split=<name> method=<random|perturb>" header,
// then "<label>\t<space separated tokens>" per line.
struct SplitHeader {
  std::string regex;
  std::uint64_t seed = 0;
  std::string split;
  std::string method;
};

std::string format_split(const Split& split, const Alphabet& alphabet, const SplitHeader& header);
Split parse_split(std::string_view text, const Alphabet& alphabet, SplitHeader* header = nullptr,
                  std::string_view source = "<corpus>");

void write_split(const std::filesystem::path& path, const Split& split, const Alphabet& alphabet,
                 const SplitHeader& header);
Split read_split(const std::filesystem::path& path, const Alphabet& alphabet, SplitHeader* header = nullptr);

// Writes train.tsv, validation.tsv, test.tsv and dataset.json into `dir`.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Shared text-file helpers.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace rgi
