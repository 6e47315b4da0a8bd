#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rgi/analysis.hpp"
#include "rgi/datagen.hpp"
#include "rgi/extraction.hpp"
#include "rgi/rnn.hpp"

namespace rgi {

struct AnalysisOptions {
  double eps_cycle = kDefaultCycleEpsilon;
  int max_error_len = kDefaultErrorLength;
  std::size_t max_errors = kDefaultErrorCap;
  std::size_t pump_count = 5;    // variants per misclassified base
  std::size_t pump_bases = 20;   // bases pumped
  std::size_t cycle_listed = 1000;
};

struct ExperimentConfig {
  std::string preset;
  std::string regex;
  std::vector<std::string> alphabet;  // empty: inferred from the regex
  GenConfig gen;
  TrainConfig train;
  ExtractionOptions extract;
  AnalysisOptions analyze;
  std::filesystem::path out = "run";
  std::optional<std::uint64_t> seed;  // master seed; 42 when unset

  std::uint64_t master_seed() const { return seed.value_or(42); }
  // Stage seeds: derive_seed(master, "generate" | "train" | "extract").
  GenConfig gen_config() const;
  TrainConfig train_config() const;
  ExtractionOptions extract_options() const;
  Alphabet resolved_alphabet() const;
  void validate() const;

  // Every setting under its flat dotted key.
  nlohmann::ordered_json to_json() const;
};

// binary-a, binary-b, pos. Throws Error for unknown names.
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

struct SettingKey {
  std::string key;    // flat dotted key, e.g. "train.epochs"
  std::string alias;  // short flag name without dashes ("" if none)
  std::string help;
};
const std::vector<SettingKey>& setting_keys();

// Sets one option from its textual value. Throws Error on unknown keys or
// malformed values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Settings in application order (later wins). A "preset" entry, wherever it
// appears, is applied first; then file settings, then flag settings.
ExperimentConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_settings,
                                const std::vector<std::pair<std::string, std::string>>& flag_settings);

// Flat JSON object -> (key, textual value) pairs.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

// Run-directory artifact names.
namespace artifact {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kTruthDot = "truth.dot";
inline constexpr const char* kTruthTable = "truth.tsv";
inline constexpr const char* kParams = "params.txt";
inline constexpr const char* kHistory = "history.json";
inline constexpr const char* kDfaDot = "dfa.dot";
inline constexpr const char* kDfaTable = "dfa.tsv";
inline constexpr const char* kRawDot = "raw_dfa.dot";
inline constexpr const char* kCentroids = "centroids.json";
inline constexpr const char* kExtraction = "extraction.json";
inline constexpr const char* kCycles = "cycles.json";
inline constexpr const char* kPcaCsv = "pca.csv";
inline constexpr const char* kPcaSvg = "pca.svg";
inline constexpr const char* kClusters = "clusters.json";
inline constexpr const char* kErrors = "errors.json";
inline constexpr const char* kAugmentation = "augmentation.tsv";
inline constexpr const char* kAugmentationJson = "augmentation.json";
inline constexpr const char* kEval = "eval.json";
inline constexpr const char* kSummary = "summary.json";
}  // namespace artifact

// Each stage reads its inputs from and writes its outputs to cfg.out.
// Messages go to `log` when given; results are also returned.
Dataset cmd_generate(const ExperimentConfig& cfg, std::ostream* log = nullptr);
TrainResult cmd_train(const ExperimentConfig& cfg, std::ostream* log = nullptr);
// On K-selection failure the report is written before the error propagates.
nlohmann::ordered_json cmd_extract(const ExperimentConfig& cfg, std::ostream* log = nullptr);
nlohmann::ordered_json cmd_analyze(const ExperimentConfig& cfg, std::ostream* log = nullptr);
nlohmann::ordered_json cmd_eval(const ExperimentConfig& cfg, std::ostream* log = nullptr);
// All stages, then summary.json (written last, only on success).
nlohmann::ordered_json cmd_run_all(const ExperimentConfig& cfg, std::ostream* log = nullptr);

Dfa truth_dfa(const std::string& regex, const Alphabet& alphabet);

}  // namespace rgi
