#include "rgi/pipeline.hpp"

#include <charconv>
#include <functional>
#include <ostream>

#include "rgi/dot.hpp"
#include "rgi/regex.hpp"

namespace rgi {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end)
    throw Error("bad value '" + std::string(text) + "' for setting '" + std::string(key) + "'");
  return v;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    auto item = s.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

struct Setting {
  SettingKey info;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<ordered_json(const ExperimentConfig&)> get;
};

#define RGI_NUM(KEY, ALIAS, HELP, FIELD)                                                                   \
  Setting {                                                                                                \
    {KEY, ALIAS, HELP},                                                                                    \
        [](ExperimentConfig& c, std::string_view v) { c.FIELD = parse_number<decltype(c.FIELD)>(KEY, v); }, \
        [](const ExperimentConfig& c) { return ordered_json(c.FIELD); }                                    \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      {{"preset", "preset", "named experiment: binary-a, binary-b, pos"},
       [](ExperimentConfig& c, std::string_view v) { c.preset = v; },
       [](const ExperimentConfig& c) { return ordered_json(c.preset); }},
      {{"regex", "regex", "ground-truth regular expression"},
       [](ExperimentConfig& c, std::string_view v) { c.regex = v; },
       [](const ExperimentConfig& c) { return ordered_json(c.regex); }},
      {{"alphabet", "alphabet", "comma-separated tokens (default: inferred from the regex)"},
       [](ExperimentConfig& c, std::string_view v) { c.alphabet = split_list(v); },
       [](const ExperimentConfig& c) { return ordered_json(c.alphabet); }},
      {{"seed", "seed", "master seed"},
       [](ExperimentConfig& c, std::string_view v) { c.seed = parse_number<std::uint64_t>("seed", v); },
       [](const ExperimentConfig& c) { return ordered_json(c.master_seed()); }},
      {{"out", "out", "run directory"},
       [](ExperimentConfig& c, std::string_view v) { c.out = fs::path(std::string(v)); },
       [](const ExperimentConfig& c) { return ordered_json(c.out.generic_string()); }},
      RGI_NUM("gen.train_size", "train-size", "training split size", gen.train_size),
      RGI_NUM("gen.validation_size", "validation-size", "validation split size", gen.validation_size),
      RGI_NUM("gen.test_size", "test-size", "test split size", gen.test_size),
      {{"gen.method", "method", "negative sampling: random or perturb"},
       [](ExperimentConfig& c, std::string_view v) { c.gen.method = parse_negative_method(v); },
       [](const ExperimentConfig& c) { return ordered_json(to_string(c.gen.method)); }},
      RGI_NUM("gen.star_p", "star-p", "probability of another star repetition", gen.star_p),
      RGI_NUM("gen.max_len", "max-len", "maximum string length", gen.max_len),
      {{"gen.dedup", "dedup", "duplicate policy: none or within-split"},
       [](ExperimentConfig& c, std::string_view v) { c.gen.dedup = parse_dedup_policy(v); },
       [](const ExperimentConfig& c) { return ordered_json(to_string(c.gen.dedup)); }},
      RGI_NUM("train.epochs", "epochs", "maximum epochs", train.epochs),
      RGI_NUM("train.lr", "lr", "Adam learning rate", train.learning_rate),
      RGI_NUM("train.beta1", "", "Adam beta1", train.beta1),
      RGI_NUM("train.beta2", "", "Adam beta2", train.beta2),
      RGI_NUM("train.adam_epsilon", "", "Adam epsilon", train.adam_epsilon),
      RGI_NUM("train.batch_size", "batch-size", "minibatch size", train.batch_size),
      RGI_NUM("train.hidden", "hidden", "hidden state width H", train.hidden),
      RGI_NUM("train.head", "head", "classifier head width M", train.head),
      RGI_NUM("train.target_accuracy", "target-accuracy", "stop once validation accuracy reaches this",
              train.target_accuracy),
      RGI_NUM("train.clip_norm", "clip-norm", "global gradient norm clip (<= 0 disables)", train.clip_norm),
      RGI_NUM("extract.threshold", "threshold", "fidelity needed to accept K", extract.threshold),
      RGI_NUM("extract.k_min", "k-min", "first K tried", extract.k_min),
      RGI_NUM("extract.k_max", "k-max", "last K tried", extract.k_max),
      RGI_NUM("extract.restarts", "restarts", "k-means restarts per K", extract.restarts),
      RGI_NUM("analyze.eps_cycle", "eps-cycle", "distance under which two states count as a repeat",
              analyze.eps_cycle),
      RGI_NUM("analyze.max_error_len", "max-error-len", "longest misclassified string enumerated",
              analyze.max_error_len),
      RGI_NUM("analyze.max_errors", "max-errors", "misclassified strings listed per class", analyze.max_errors),
      RGI_NUM("analyze.pump_count", "pump-count", "pumped variants per misclassified string", analyze.pump_count),
      RGI_NUM("analyze.pump_bases", "pump-bases", "misclassified strings pumped", analyze.pump_bases),
      RGI_NUM("analyze.cycle_listed", "", "strings listed in the cycle report", analyze.cycle_listed),
  };
  return table;
}

#undef RGI_NUM

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << '\n' << std::flush;
}

std::string fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

void write_json(const fs::path& path, const ordered_json& j) { write_file(path, j.dump(2) + "\n"); }

ordered_json read_json(const fs::path& path) {
  try {
    return ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// Master seed: the flag/config value, else the one recorded by generate.
std::uint64_t run_seed(const ExperimentConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  const fs::path p = cfg.out / artifact::kConfig;
  if (fs::exists(p)) {
    const auto j = read_json(p);
    if (j.contains("seed") && j["seed"].is_number_unsigned()) return j["seed"].get<std::uint64_t>();
  }
  return cfg.master_seed();
}

ExperimentConfig with_run_seed(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.seed = run_seed(cfg);
  return c;
}

std::string provenance(const Dataset& ds, std::uint64_t seed, const char* stage) {
  return "regex=" + ds.regex + " seed=" + std::to_string(seed) + " stage=" + stage;
}

std::vector<Word> words_of(const Split& s) {
  std::vector<Word> out;
  out.reserve(s.size());
  for (const auto& ls : s) out.push_back(ls.tokens);
  return out;
}

double dfa_accuracy(const Dfa& dfa, const Split& s) {
  if (s.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& ls : s) ok += accepts(dfa, ls.tokens) == (ls.label == 1);
  return static_cast<double>(ok) / static_cast<double>(s.size());
}

struct RunInputs {
  Dataset ds;
  RnnParams params;
};

RunInputs load_trained(const ExperimentConfig& cfg) {
  RunInputs in{load_dataset(cfg.out), load_params(cfg.out / artifact::kParams)};
  if (!(in.params.alphabet == in.ds.alphabet))
    throw Error("parameter alphabet {" + in.params.alphabet.join() + "} does not match the corpus {" +
                in.ds.alphabet.join() + "}");
  return in;
}

Dfa load_extracted(const ExperimentConfig& cfg, const Alphabet& alphabet) {
  const fs::path p = cfg.out / artifact::kDfaTable;
  return reorder_alphabet(read_table(read_file(p), p.string()), alphabet);
}

ordered_json counterexample_json(const std::optional<Word>& w, const Alphabet& a) {
  return w ? ordered_json(a.format(*w)) : ordered_json(nullptr);
}

}  // namespace

// ---------------------------------------------------------------- config

GenConfig ExperimentConfig::gen_config() const {
  GenConfig g = gen;
  g.seed = derive_seed(master_seed(), "generate");
  return g;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t = train;
  t.seed = derive_seed(master_seed(), "train");
  return t;
}

ExtractionOptions ExperimentConfig::extract_options() const {
  ExtractionOptions e = extract;
  e.seed = derive_seed(master_seed(), "extract");
  return e;
}

Alphabet ExperimentConfig::resolved_alphabet() const {
  return alphabet.empty() ? infer_alphabet(regex) : Alphabet(alphabet);
}

void ExperimentConfig::validate() const {
  gen.validate();
  train.validate();
  if (!(extract.threshold >= 0 && extract.threshold <= 1)) throw Error("extract.threshold must be in [0, 1]");
  if (extract.k_min < 2) throw Error("extract.k_min must be >= 2");
  if (extract.k_max < extract.k_min) throw Error("extract.k_max must be >= extract.k_min");
  if (extract.restarts < 1) throw Error("extract.restarts must be >= 1");
  if (!(analyze.eps_cycle >= 0)) throw Error("analyze.eps_cycle must be >= 0");
  if (analyze.max_error_len < 0 || analyze.max_error_len > 64) throw Error("analyze.max_error_len must be in [0, 64]");
  if (out.empty()) throw Error("output directory must not be empty");
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  for (const auto& s : settings()) j[s.info.key] = s.get(*this);
  return j;
}

std::vector<std::string> preset_names() { return {"binary-a", "binary-b", "pos"}; }

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "binary-a") {
    c.regex = "(01)*";
    c.alphabet = {"0", "1"};
  } else if (name == "binary-b") {
    c.regex = "(0|1)*100";
    c.alphabet = {"0", "1"};
  } else if (name == "pos") {
    c.regex = "Det? Adj* Noun Verb (Det? Adj* Noun)?";
    c.alphabet = {"Det", "Adj", "Noun", "Verb"};
    c.gen.max_len = 12;
  } else {
    throw Error("unknown preset '" + std::string(name) + "' (expected binary-a, binary-b or pos)");
  }
  return c;
}

const std::vector<SettingKey>& setting_keys() {
  static const std::vector<SettingKey> keys = [] {
    std::vector<SettingKey> out;
    for (const auto& s : settings()) out.push_back(s.info);
    return out;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& s : settings())
    if (s.info.key == key) {
      s.set(cfg, value);
      return;
    }
  throw Error("unknown setting '" + std::string(key) + "'");
}

ExperimentConfig resolve_config(const std::vector<std::pair<std::string, std::string>>& file_settings,
                                const std::vector<std::pair<std::string, std::string>>& flag_settings) {
  std::optional<std::string> preset;
  for (const auto* list : {&file_settings, &flag_settings})
    for (const auto& [k, v] : *list)
      if (k == "preset") preset = v;
  ExperimentConfig cfg = preset && !preset->empty() ? preset_config(*preset) : ExperimentConfig{};
  for (const auto* list : {&file_settings, &flag_settings})
    for (const auto& [k, v] : *list)
      if (k != "preset") apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  const auto j = read_json(path);
  if (!j.is_object()) throw Error(path.string() + ": config must be a JSON object");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : j.items()) {
    std::string text;
    if (v.is_string()) {
      text = v.get<std::string>();
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_string()) throw Error(path.string() + ": '" + k + "' must be a list of strings");
        text += (text.empty() ? "" : ",") + e.get<std::string>();
      }
    } else if (v.is_number() || v.is_boolean()) {
      text = v.dump();
    } else {
      throw Error(path.string() + ": unsupported value for '" + k + "'");
    }
    out.emplace_back(k, text);
  }
  return out;
}

Dfa truth_dfa(const std::string& regex, const Alphabet& alphabet) { return minimize(regex_to_dfa(regex, alphabet)); }

// ---------------------------------------------------------------- stages

Dataset cmd_generate(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.regex.empty()) throw Error("no regex given (use --regex or --preset)");
  const Alphabet alphabet = cfg.resolved_alphabet();
  const Dfa truth = truth_dfa(cfg.regex, alphabet);
  Dataset ds = generate_dataset(cfg.regex, alphabet, cfg.gen_config());
  save_dataset(ds, cfg.out);
  const std::string meta = provenance(ds, cfg.master_seed(), "generate");
  write_file(cfg.out / artifact::kTruthDot, "// " + meta + "\n" + export_dot(truth, {}, "truth"));
  write_file(cfg.out / artifact::kTruthTable, "# meta " + meta + "\n" + write_table(truth));
  ordered_json c = cfg.to_json();
  c["seed"] = cfg.master_seed();
  write_json(cfg.out / artifact::kConfig, c);
  note(log, "generated " + std::to_string(ds.train.size()) + "/" + std::to_string(ds.validation.size()) + "/" +
                std::to_string(ds.test.size()) + " strings for " + ds.regex + " in " + cfg.out.string());
  return ds;
}

TrainResult cmd_train(const ExperimentConfig& in_cfg, std::ostream* log) {
  const ExperimentConfig cfg = with_run_seed(in_cfg);
  cfg.validate();
  const Dataset ds = load_dataset(cfg.out);
  TrainResult r = train(ds, cfg.train_config(), [&](const EpochRecord& e) {
    note(log, "epoch " + std::to_string(e.epoch) + " loss " + fixed(e.train_loss, 6) + " val_accuracy " +
                  fixed(e.val_accuracy));
  });
  save_params(r.params, cfg.out / artifact::kParams);
  write_file(cfg.out / artifact::kHistory, history_json(r.history));
  return r;
}

ordered_json cmd_extract(const ExperimentConfig& in_cfg, std::ostream* log) {
  const ExperimentConfig cfg = with_run_seed(in_cfg);
  cfg.validate();
  const auto in = load_trained(cfg);
  const ExtractionOptions opts = cfg.extract_options();
  const std::string meta = provenance(in.ds, cfg.master_seed(), "extract");
  auto stamp = [&](ordered_json rep) {
    ordered_json j;
    j["regex"] = in.ds.regex;
    j["seed"] = cfg.master_seed();
    j["stage"] = "extract";
    j["fidelity_split"] = "validation";
    j.update(rep);
    return j;
  };

  Extraction ex;
  try {
    ex = extract(in.params, in.ds.validation, opts);
  } catch (const KSelectionError& e) {
    write_json(cfg.out / artifact::kExtraction, stamp(failed_extraction_report(e, opts)));
    throw;
  }
  const auto& sel = ex.selection;

  std::map<int, std::string> raw_labels{{0, "s0"}};
  for (int c = 0; c < sel.k; ++c) raw_labels[ExtractedDfa::state_of_cluster(c)] = "c" + std::to_string(c);
  write_file(cfg.out / artifact::kRawDot, "// " + meta + "\n" + export_dot(sel.extracted.dfa, raw_labels, "raw"));
  write_file(cfg.out / artifact::kDfaDot, "// " + meta + "\n" + export_dot(ex.minimized, {}, "extracted"));
  write_file(cfg.out / artifact::kDfaTable, "# meta " + meta + "\n" + write_table(ex.minimized));

  ordered_json cent;
  cent["regex"] = in.ds.regex;
  cent["seed"] = cfg.master_seed();
  cent["k"] = sel.k;
  cent["hidden"] = sel.clustering.centroids.rows();
  auto& arr = cent["centroids"] = ordered_json::array();
  for (Eigen::Index c = 0; c < sel.clustering.centroids.cols(); ++c) {
    std::vector<double> v(sel.clustering.centroids.col(c).data(),
                          sel.clustering.centroids.col(c).data() + sel.clustering.centroids.rows());
    arr.push_back(v);
  }
  write_json(cfg.out / artifact::kCentroids, cent);

  ordered_json rep = stamp(extraction_report(ex, opts));
  const auto test_words = words_of(in.ds.test);
  rep["test_accuracy"] = dfa_accuracy(ex.minimized, in.ds.test);
  rep["network_test_accuracy"] = evaluate(in.params, in.ds.test);
  rep["test_fidelity"] = fidelity(ex.minimized, in.params, test_words).match_rate;
  write_json(cfg.out / artifact::kExtraction, rep);
  note(log, "selected K=" + std::to_string(sel.k) + " fidelity " + fixed(sel.fidelity.match_rate) + ", minimized " +
                std::to_string(ex.minimized.size()) + " states");
  return rep;
}

ordered_json cmd_analyze(const ExperimentConfig& in_cfg, std::ostream* log) {
  const ExperimentConfig cfg = with_run_seed(in_cfg);
  cfg.validate();
  const auto in = load_trained(cfg);
  const Alphabet& alphabet = in.ds.alphabet;
  const Dfa truth = truth_dfa(in.ds.regex, alphabet);
  const Dfa extracted = load_extracted(cfg, alphabet);

  // clustering from the saved centroids
  const auto cj = read_json(cfg.out / artifact::kCentroids);
  Clustering cl;
  try {
    const auto& rows = cj.at("centroids");
    cl.k = static_cast<int>(rows.size());
    cl.centroids.resize(in.params.hidden(), cl.k);
    for (int c = 0; c < cl.k; ++c) {
      const auto v = rows.at(static_cast<std::size_t>(c)).get<std::vector<double>>();
      if (static_cast<int>(v.size()) != in.params.hidden()) throw Error("centroid width does not match H");
      for (int i = 0; i < in.params.hidden(); ++i) cl.centroids(i, c) = v[static_cast<std::size_t>(i)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error((cfg.out / artifact::kCentroids).string() + ": " + e.what());
  }
  if (cl.k < 1) throw Error("no centroids in " + (cfg.out / artifact::kCentroids).string());
  const StateCollection states = collect_states(in.params, std::span<const LabeledString>(in.ds.validation));
  cl.assignment.resize(states.size());
  for (std::size_t j = 0; j < states.size(); ++j)
    cl.assignment[j] = nearest_centroid(cl.centroids, states.points.col(static_cast<Eigen::Index>(j)));
  const ExtractedDfa raw = build_dfa(states, cl);

  // cycles over the same strings
  std::vector<StateTrace> traces;
  traces.reserve(in.ds.validation.size());
  for (const auto& ls : in.ds.validation) traces.push_back(forward(in.params, ls.tokens));
  const CycleReport cycles = detect_cycles(traces, cfg.analyze.eps_cycle);
  ordered_json cyc;
  cyc["regex"] = in.ds.regex;
  cyc["seed"] = cfg.master_seed();
  cyc["stage"] = "analyze";
  cyc["strings_from"] = "validation";
  cyc.update(cycle_report_json(cycles, cfg.analyze.cycle_listed));
  write_json(cfg.out / artifact::kCycles, cyc);

  // PCA
  ordered_json clusters;
  clusters["regex"] = in.ds.regex;
  clusters["seed"] = cfg.master_seed();
  clusters["k"] = cl.k;
  if (states.size() >= 2) {
    const Pca pca = pca_project(states.points, std::min(2, in.params.hidden()));
    write_file(cfg.out / artifact::kPcaCsv, pca_csv(pca, states, cl, in.params));
    write_file(cfg.out / artifact::kPcaSvg, pca_svg(pca, states, cl, raw, in.params));
    clusters["explained_variance_ratio"] = std::vector<double>(pca.ratios.data(), pca.ratios.data() + pca.ratios.size());
    clusters["degenerate"] = pca.degenerate;
    const Eigen::VectorXd s0 = pca.project(Eigen::VectorXd::Zero(in.params.hidden()));
    clusters["s0_projection"] = std::vector<double>(s0.data(), s0.data() + s0.size());
  } else {
    write_file(cfg.out / artifact::kPcaCsv, "x,y,cluster_id,is_final,network_decision\n");
  }
  clusters["accepting_clusters"] = raw.accepting_clusters();
  clusters.update(cluster_decision_report(states, cl));
  write_json(cfg.out / artifact::kClusters, clusters);

  // errors against the ground truth
  const ErrorReport errs =
      mine_errors(extracted, truth, in.ds.test, cfg.analyze.max_error_len, cfg.analyze.max_errors);
  ordered_json ej;
  ej["regex"] = in.ds.regex;
  ej["seed"] = cfg.master_seed();
  ej["stage"] = "analyze";
  ej.update(error_report_json(errs, alphabet));
  write_json(cfg.out / artifact::kErrors, ej);

  const auto augs = augment(extracted, truth, errs, cfg.analyze.pump_count, cfg.analyze.pump_bases);
  Split variants;
  ordered_json aj = ordered_json::array();
  for (const auto& a : augs) {
    variants.insert(variants.end(), a.variants.begin(), a.variants.end());
    aj.push_back({{"base", alphabet.format(a.base)},
                  {"prefix", alphabet.format(a.prefix)},
                  {"infix", alphabet.format(a.infix)},
                  {"suffix", alphabet.format(a.suffix)},
                  {"variants", a.variants.size()}});
  }
  write_split(cfg.out / artifact::kAugmentation, variants, alphabet,
              {in.ds.regex, cfg.master_seed(), "augmentation", "pump"});
  write_json(cfg.out / artifact::kAugmentationJson, aj);

  ordered_json summary;
  summary["cycles"] = {{"epsilon", cycles.epsilon},
                       {"strings", cycles.strings},
                       {"strings_with_repeats", cycles.strings_with_repeats},
                       {"exact_repeats", cycles.exact_repeats},
                       {"epsilon_repeats", cycles.epsilon_repeats}};
  summary["false_accepts"] = errs.false_accepts.size();
  summary["false_rejects"] = errs.false_rejects.size();
  summary["augmentation_strings"] = variants.size();
  summary["single_decision_per_cluster"] = clusters["single_decision_per_cluster"];
  note(log, "cycles: " + std::to_string(cycles.exact_repeats) + " exact, " + std::to_string(cycles.epsilon_repeats) +
                " near repeats; errors: " + std::to_string(errs.false_accepts.size()) + " false accepts, " +
                std::to_string(errs.false_rejects.size()) + " false rejects");
  return summary;
}

ordered_json cmd_eval(const ExperimentConfig& in_cfg, std::ostream* log) {
  const ExperimentConfig cfg = with_run_seed(in_cfg);
  const auto in = load_trained(cfg);
  const Alphabet& alphabet = in.ds.alphabet;
  const Dfa truth = truth_dfa(in.ds.regex, alphabet);
  const Dfa extracted = load_extracted(cfg, alphabet);
  const auto cex = equivalent(extracted, truth);
  ordered_json j;
  j["regex"] = in.ds.regex;
  j["seed"] = cfg.master_seed();
  j["stage"] = "eval";
  j["network_test_accuracy"] = evaluate(in.params, in.ds.test);
  j["dfa_test_accuracy"] = dfa_accuracy(extracted, in.ds.test);
  j["dfa_network_agreement"] = fidelity(extracted, in.params, words_of(in.ds.test)).match_rate;
  j["equivalent_to_truth"] = !cex.has_value();
  j["shortest_counterexample"] = counterexample_json(cex, alphabet);
  j["minimized_state_count"] = minimize(complete(extracted)).size();
  j["truth_state_count"] = truth.size();
  write_json(cfg.out / artifact::kEval, j);
  note(log, std::string("equivalent to truth: ") + (cex ? "no, counterexample '" + alphabet.format(*cex) + "'" : "yes"));
  return j;
}

ordered_json cmd_run_all(const ExperimentConfig& in_cfg, std::ostream* log) {
  ExperimentConfig cfg = in_cfg;
  cfg.seed = cfg.master_seed();
  cfg.validate();
  fs::remove(cfg.out / artifact::kSummary);
  const Dataset ds = cmd_generate(cfg, log);
  const TrainResult tr = cmd_train(cfg, log);
  const ordered_json ext = cmd_extract(cfg, log);
  const ordered_json ana = cmd_analyze(cfg, log);
  const ordered_json ev = cmd_eval(cfg, log);

  ordered_json s;
  s["regex"] = ds.regex;
  s["alphabet"] = ds.alphabet.tokens();
  s["seed"] = cfg.master_seed();
  s["epochs_run"] = tr.history.size();
  s["best_epoch"] = tr.best_epoch;
  s["val_accuracy"] = tr.best_val_accuracy;
  s["initial_train_loss"] = tr.initial_train_loss;
  s["final_train_loss"] = tr.history.empty() ? tr.initial_train_loss : tr.history.back().train_loss;
  s["network_test_accuracy"] = ev["network_test_accuracy"];
  s["selected_k"] = ext["selected_k"];
  s["fidelity"] = ext["fidelity"];
  s["dfa_test_accuracy"] = ev["dfa_test_accuracy"];
  s["equivalent_to_truth"] = ev["equivalent_to_truth"];
  s["shortest_counterexample"] = ev["shortest_counterexample"];
  s["transition_conflict_rate"] = ext["transition_conflict_rate"];
  s["accept_conflict_rate"] = ext["accept_conflict_rate"];
  s["accepting_clusters"] = ext["accepting_clusters"];
  s["raw_state_count"] = ext["raw_state_count"];
  s["minimized_state_count"] = ext["minimized_state_count"];
  s["truth_state_count"] = ev["truth_state_count"];
  s["false_accepts"] = ana["false_accepts"];
  s["false_rejects"] = ana["false_rejects"];
  s["cycles"] = ana["cycles"];
  write_json(cfg.out / artifact::kSummary, s);
  return s;
}

}  // namespace rgi
