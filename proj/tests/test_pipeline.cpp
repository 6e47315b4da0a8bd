#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "rgi/pipeline.hpp"

using namespace rgi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rgi_test_pipeline_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small(const std::string& preset, const fs::path& out, std::uint64_t seed = 3) {
  ExperimentConfig c = preset_config(preset);
  c.gen.train_size = 2000;
  c.gen.validation_size = 1000;
  c.gen.test_size = 1000;
  c.out = out;
  c.seed = seed;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RGI_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("presets and settings") {
  const auto a = preset_config("binary-a");
  CHECK(a.regex == "(01)*");
  CHECK(preset_config("binary-b").regex == "(0|1)*100");
  const auto pos = preset_config("pos");
  CHECK(pos.alphabet == std::vector<std::string>{"Det", "Adj", "Noun", "Verb"});
  CHECK(pos.gen.max_len == 12);
  CHECK(a.gen.max_len == 30);
  CHECK_THROWS_AS(preset_config("nope"), Error);

  ExperimentConfig c;
  apply_setting(c, "train.epochs", "7");
  apply_setting(c, "gen.method", "perturb");
  apply_setting(c, "extract.threshold", "0.5");
  apply_setting(c, "alphabet", "a, b");
  CHECK(c.train.epochs == 7);
  CHECK(c.gen.method == NegativeMethod::Perturb);
  CHECK(c.extract.threshold == 0.5);
  CHECK(c.alphabet == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(apply_setting(c, "train.nope", "1"), Error);
  CHECK_THROWS_AS(apply_setting(c, "train.epochs", "seven"), Error);
  CHECK_THROWS_AS(apply_setting(c, "train.epochs", "7x"), Error);

  // every key survives a to_json -> apply round trip
  const auto j = pos.to_json();
  ExperimentConfig back;
  for (const auto& k : setting_keys()) {
    const auto& v = j.at(k.key);
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_array()) {
      for (const auto& e : v) text += (text.empty() ? "" : ",") + e.get<std::string>();
    } else {
      text = v.dump();
    }
    apply_setting(back, k.key, text);
  }
  CHECK(back.to_json() == j);
}

TEST_CASE("config precedence") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  write_file(dir / "c.json", R"({"preset": "binary-b", "train.epochs": 4, "gen.star_p": 0.25, "seed": 9})");
  const auto file = read_config_file(dir / "c.json");
  const auto cfg = resolve_config(file, {{"train.epochs", "6"}});
  CHECK(cfg.regex == "(0|1)*100");
  CHECK(cfg.train.epochs == 6);
  CHECK(cfg.gen.star_p == 0.25);
  CHECK(cfg.master_seed() == 9);
  // flag preset replaces the file's, file values still apply
  const auto cfg2 = resolve_config(file, {{"preset", "binary-a"}});
  CHECK(cfg2.regex == "(01)*");
  CHECK(cfg2.train.epochs == 4);
  CHECK_THROWS_AS(resolve_config({}, {{"train.epochs", "0"}}), Error);

  write_file(dir / "bad.json", "[1, 2]");
  CHECK_THROWS_AS(read_config_file(dir / "bad.json"), Error);
  CHECK_THROWS_AS(read_config_file(dir / "missing.json"), Error);
  fs::remove_all(dir);
}

TEST_CASE("stage seeds are derived from the master seed") {
  ExperimentConfig c;
  c.seed = 11;
  CHECK(c.gen_config().seed == derive_seed(11, "generate"));
  CHECK(c.train_config().seed == derive_seed(11, "train"));
  CHECK(c.extract_options().seed == derive_seed(11, "extract"));
  CHECK(c.gen_config().seed != c.train_config().seed);
}

TEST_CASE("generate") {
  const fs::path dir = scratch("gen");
  auto cfg = preset_config("binary-a");
  cfg.out = dir;
  cfg.seed = 42;
  const auto ds = cmd_generate(cfg);
  CHECK(ds.train.size() == 15000);
  CHECK(ds.validation.size() == 10000);
  CHECK(ds.test.size() == 10000);
  for (const char* f : {"train.tsv", "validation.tsv", "test.tsv", "dataset.json", artifact::kTruthDot,
                        artifact::kTruthTable, artifact::kConfig})
    CHECK(fs::exists(dir / f));
  // header line + one line per string
  const auto text = read_file(dir / "train.tsv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 15001);
  const Dfa truth = read_table(read_file(dir / artifact::kTruthTable));
  CHECK(truth.size() == 3);

  const auto before = read_file(dir / "test.tsv");
  cmd_generate(cfg);
  CHECK(read_file(dir / "test.tsv") == before);
  fs::remove_all(dir);
}

TEST_CASE("run-all artifacts and determinism") {
  const fs::path d1 = scratch("run1"), d2 = scratch("run2");
  const auto s1 = cmd_run_all(small("binary-b", d1));
  const auto s2 = cmd_run_all(small("binary-b", d2));
  CHECK(read_file(d1 / artifact::kSummary) == read_file(d2 / artifact::kSummary));
  CHECK(s1 == s2);
  for (const char* f : {artifact::kParams, artifact::kHistory, artifact::kDfaDot, artifact::kDfaTable, artifact::kRawDot,
                        artifact::kCentroids, artifact::kExtraction, artifact::kCycles, artifact::kPcaCsv,
                        artifact::kPcaSvg, artifact::kClusters, artifact::kErrors, artifact::kAugmentation,
                        artifact::kEval})
    CHECK(fs::exists(d1 / f));
  for (const char* key : {"val_accuracy", "selected_k", "dfa_test_accuracy", "equivalent_to_truth",
                          "shortest_counterexample", "transition_conflict_rate", "accept_conflict_rate", "cycles"})
    CHECK(s1.contains(key));
  CHECK(s1["epochs_run"].get<int>() <= 15);
  CHECK(s1.dump().find("time") == std::string::npos);

  // PCA rows: one per collected state
  const auto ext = nlohmann::json::parse(read_file(d1 / artifact::kExtraction));
  const auto csv = read_file(d1 / artifact::kPcaCsv);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        ext["collected_states"].get<std::size_t>() + 1);

  // equivalent runs have nothing to mine or pump
  if (s1["equivalent_to_truth"] == true) {
    const auto errs = nlohmann::json::parse(read_file(d1 / artifact::kErrors));
    CHECK(errs["false_accepts"].empty());
    CHECK(errs["false_rejects"].empty());
    const auto aug = read_file(d1 / artifact::kAugmentation);
    CHECK(std::count(aug.begin(), aug.end(), '\n') == 1);
  }

  // stage re-run from its inputs
  const auto ext_before = read_file(d1 / artifact::kExtraction);
  auto again = small("binary-b", d1);
  again.seed.reset();  // picked up from config.json
  cmd_extract(again);
  CHECK(read_file(d1 / artifact::kExtraction) == ext_before);

  SUBCASE("eps 0 keeps exact repeats only") {
    auto c = small("binary-b", d1);
    c.analyze.eps_cycle = 0;
    const auto a = cmd_analyze(c);
    CHECK(a["cycles"]["epsilon_repeats"] == 0);
  }
  SUBCASE("threshold 0 gives K=2") {
    auto c = small("binary-b", d1);
    c.extract.threshold = 0;
    const auto rep = cmd_extract(c);
    CHECK(rep["selected_k"] == 2);
    CHECK(rep["fidelity_curve"].size() == 1);
    CHECK(fs::exists(d1 / artifact::kDfaTable));
    const auto ev = cmd_eval(c);
    CHECK(ev.contains("dfa_test_accuracy"));
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("config file run equals flag run") {
  const fs::path d1 = scratch("flags"), d2 = scratch("file");
  cmd_run_all(resolve_config({}, {{"preset", "binary-a"},
                                  {"gen.train_size", "1500"},
                                  {"gen.validation_size", "800"},
                                  {"gen.test_size", "800"},
                                  {"seed", "5"},
                                  {"out", d1.string()}}));
  fs::create_directories(d2);
  write_file(d2 / "cfg.json", R"({"preset": "binary-a", "gen.train_size": 1500, "gen.validation_size": 800,
                                  "gen.test_size": 800, "seed": 5})");
  cmd_run_all(resolve_config(read_config_file(d2 / "cfg.json"), {{"out", d2.string()}}));
  CHECK(read_file(d1 / artifact::kSummary) == read_file(d2 / artifact::kSummary));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("extraction failure keeps the report") {
  const fs::path dir = scratch("fail");
  auto c = small("pos", dir);
  c.train.epochs = 2;
  cmd_generate(c);
  cmd_train(c);
  c.extract.threshold = 1.0;
  c.extract.k_max = 2;
  try {
    cmd_extract(c);
    FAIL("expected KSelectionError");
  } catch (const KSelectionError& e) {
    CHECK(e.exit_code() == 4);
  }
  const auto rep = nlohmann::json::parse(read_file(dir / artifact::kExtraction));
  CHECK(rep["selected_k"].is_null());
  CHECK(rep["fidelity_curve"].size() == 1);
  fs::remove_all(dir);
}

TEST_CASE("stage inputs missing") {
  ExperimentConfig c;
  c.out = scratch("missing");
  CHECK_THROWS_AS(cmd_train(c), Error);
  try {
    cmd_train(c);
  } catch (const Error& e) {
    CHECK(e.exit_code() == 2);
  }
  CHECK_THROWS_AS(cmd_generate(c), Error);  // no regex
}

TEST_CASE("command line") {
  const fs::path dir = scratch("cli");
  const std::string out = " --out " + dir.string();
  CHECK(run_cli("generate --regex \"(01*\"" + out) == 2);
  CHECK(run_cli("train" + out) == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("generate --preset binary-a --train-size 300 --validation-size 200 --test-size 200 --seed 2" +
                out) == 0);
  CHECK(fs::exists(dir / "train.tsv"));
  CHECK(run_cli("train --epochs 0" + out) == 2);
  CHECK(run_cli("train --train.epochs 2" + out) == 0);
  CHECK(nlohmann::json::parse(read_file(dir / artifact::kHistory)).size() <= 2);
  CHECK(run_cli("extract --threshold 0" + out) == 0);
  CHECK(fs::exists(dir / artifact::kDfaTable));
  CHECK(run_cli("analyze --eps-cycle 0" + out) == 0);
  CHECK(run_cli("eval" + out) == 0);
  CHECK(fs::exists(dir / artifact::kEval));
  CHECK(run_cli("--help") == 0);
  fs::remove_all(dir);
}
