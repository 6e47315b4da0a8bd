// rgi: regular grammar inference from recurrent networks.
//
//   rgi generate --preset binary-b --out runs/b1 --seed 1
//   rgi train    --out runs/b1
//   rgi extract  --out runs/b1
//   rgi analyze  --out runs/b1
//   rgi eval     --out runs/b1
//   rgi run-all  --regex "(01)*" --out runs/a1
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "rgi/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::map<std::string, std::string> values;  // key -> raw text
};

void add_settings(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "JSON file with flat dotted keys (flags override it)");
  for (const auto& s : rgi::setting_keys()) {
    std::string names = "--" + s.key;
    if (!s.alias.empty() && s.alias != s.key) names += ",--" + s.alias;
    cmd->add_option_function<std::string>(
        names, [&flags, key = s.key](const std::string& v) { flags.values[key] = v; }, s.help);
  }
}

rgi::ExperimentConfig resolve(const Flags& flags) {
  std::vector<std::pair<std::string, std::string>> file, cli;
  if (!flags.config.empty()) file = rgi::read_config_file(flags.config);
  for (const auto& s : rgi::setting_keys()) {
    auto it = flags.values.find(s.key);
    if (it != flags.values.end()) cli.emplace_back(s.key, it->second);
  }
  return rgi::resolve_config(file, cli);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extract DFAs from recurrent networks trained on regular languages"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rgi 1.0");

  Flags flags;
  struct Cmd {
    const char* name;
    const char* help;
  };
  const Cmd cmds[] = {{"generate", "write train/validation/test corpora and the ground-truth DFA"},
                      {"train", "train the recurrent network on the corpus"},
                      {"extract", "cluster hidden states, build and minimize the DFA"},
                      {"analyze", "cycle report, PCA plot, error mining and pumping"},
                      {"eval", "compare network, extracted DFA and ground truth on the test split"},
                      {"run-all", "all stages, then summary.json"}};
  std::map<std::string, CLI::App*> sub;
  for (const auto& c : cmds) {
    sub[c.name] = app.add_subcommand(c.name, c.help);
    add_settings(sub[c.name], flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const rgi::ExperimentConfig cfg = resolve(flags);
    std::ostream* log = &std::cerr;
    if (*sub["generate"]) {
      const auto ds = rgi::cmd_generate(cfg, log);
      std::cout << "wrote " << ds.train.size() << "/" << ds.validation.size() << "/" << ds.test.size()
                << " strings to " << cfg.out.string() << "\n";
    } else if (*sub["train"]) {
      const auto r = rgi::cmd_train(cfg, log);
      const double last = r.history.empty() ? 0.0 : r.history.back().val_accuracy;
      std::cout << "val_accuracy " << last << " (best " << r.best_val_accuracy << " at epoch " << r.best_epoch
                << ")\n";
    } else if (*sub["extract"]) {
      const auto rep = rgi::cmd_extract(cfg, log);
      std::cout << "selected_k " << rep["selected_k"] << " test_accuracy " << rep["test_accuracy"] << "\n";
    } else if (*sub["analyze"]) {
      std::cout << rgi::cmd_analyze(cfg, log).dump(2) << "\n";
    } else if (*sub["eval"]) {
      std::cout << rgi::cmd_eval(cfg, log).dump(2) << "\n";
    } else if (*sub["run-all"]) {
      std::cout << rgi::cmd_run_all(cfg, log).dump(2) << "\n";
    }
  } catch (const rgi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
