#include "rgi/datagen.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rgi/error.hpp"

namespace rgi {

std::string to_string(NegativeMethod m) { return m == NegativeMethod::Random ? "random" : "perturb"; }

NegativeMethod parse_negative_method(std::string_view s) {
  if (s == "random") return NegativeMethod::Random;
  if (s == "perturb") return NegativeMethod::Perturb;
  throw Error("unknown negative method '" + std::string(s) + "' (expected random|perturb)");
}

std::string to_string(DedupPolicy d) { return d == DedupPolicy::None ? "none" : "within-split"; }

DedupPolicy parse_dedup_policy(std::string_view s) {
  if (s == "none") return DedupPolicy::None;
  if (s == "within-split") return DedupPolicy::WithinSplit;
  throw Error("unknown dedup policy '" + std::string(s) + "' (expected none|within-split)");
}

void GenConfig::validate() const {
  if (!(star_p > 0.0 && star_p < 1.0)) throw Error("star continuation probability must be in (0,1)");
  if (max_len < 1) throw Error("max string length must be >= 1");
}

// --- samplers -----------------------------------------------------------------

namespace {

// Appends one draw of `node` to `out`; false once `out` exceeds max_len.
bool draw(const RegexNode& node, Rng& rng, double p, std::size_t max_len, Word& out) {
  using K = RegexNode::Kind;
  switch (node.kind) {
    case K::Literal:
      out.push_back(node.symbol);
      return out.size() <= max_len;
    case K::Concat:
      for (const auto& c : node.children)
        if (!draw(c, rng, p, max_len, out)) return false;
      return true;
    case K::Alt:
      return draw(node.children[rng.below(node.children.size())], rng, p, max_len, out);
    case K::Star:
      while (rng.bernoulli(p))
        if (!draw(node.children.front(), rng, p, max_len, out)) return false;
      return true;
    case K::Optional:
      if (rng.bernoulli(0.5)) return draw(node.children.front(), rng, p, max_len, out);
      return true;
  }
  return false;
}

}  // namespace

Word sample_positive(const RegexAst& ast, const Dfa& truth, Rng& rng, double p, int max_len, int budget) {
  for (int attempt = 0; attempt < budget; ++attempt) {
    Word w;
    if (!draw(ast.root, rng, p, static_cast<std::size_t>(max_len), w)) continue;
    if (!accepts(truth, w)) throw Error("internal: sampled string rejected by ground truth");
    return w;
  }
  throw BudgetError("positive sampling budget exhausted; max length " + std::to_string(max_len) +
                    " is too small for this regex");
}

Word sample_negative_random(const Alphabet& alphabet, int length, const Dfa& truth, Rng& rng, int budget) {
  const double total = std::pow(static_cast<double>(alphabet.size()), length);
  if (count_accepted(truth, length) >= total)
    throw BudgetError("every string of length " + std::to_string(length) + " is in the language");
  for (int attempt = 0; attempt < budget; ++attempt) {
    Word w(static_cast<std::size_t>(length));
    for (auto& s : w) s = static_cast<Symbol>(rng.below(alphabet.size()));
    if (!accepts(truth, w)) return w;
  }
  throw BudgetError("random negative budget exhausted at length " + std::to_string(length));
}

Word apply_edit(Word word, const Edit& edit) {
  switch (edit.kind) {
    case Edit::Kind::Delete:
      word.erase(word.begin() + static_cast<std::ptrdiff_t>(edit.from));
      break;
    case Edit::Kind::Insert:
      word.insert(word.begin() + static_cast<std::ptrdiff_t>(edit.to), edit.symbol);
      break;
    case Edit::Kind::Move: {
      const Symbol s = word[edit.from];
      word.erase(word.begin() + static_cast<std::ptrdiff_t>(edit.from));
      word.insert(word.begin() + static_cast<std::ptrdiff_t>(edit.to), s);
      break;
    }
  }
  return word;
}

Edit random_edit(const Word& word, std::size_t alphabet_size, Rng& rng) {
  std::vector<Edit::Kind> kinds{Edit::Kind::Insert};
  if (!word.empty()) kinds.push_back(Edit::Kind::Delete);
  if (word.size() >= 2) kinds.push_back(Edit::Kind::Move);
  Edit e{kinds[rng.below(kinds.size())]};
  switch (e.kind) {
    case Edit::Kind::Delete:
      e.from = rng.below(word.size());
      break;
    case Edit::Kind::Insert:
      e.to = rng.below(word.size() + 1);
      e.symbol = static_cast<Symbol>(rng.below(alphabet_size));
      break;
    case Edit::Kind::Move:
      e.from = rng.below(word.size());
      e.to = rng.below(word.size());  // positions in the shortened word
      break;
  }
  return e;
}

Word sample_negative_perturb(const Word& positive, const Dfa& truth, Rng& rng, int budget) {
  const std::size_t k = truth.alphabet().size();
  for (int attempt = 0; attempt < budget; ++attempt) {
    Word w = positive;
    const int edits = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < edits; ++i) w = apply_edit(std::move(w), random_edit(w, k, rng));
    if (!accepts(truth, w)) return w;
  }
  throw BudgetError("perturbation budget exhausted; input is too robust to edits");
}

// --- dataset --------------------------------------------------------------------

namespace {

constexpr int kLengthRetries = 200;

Split generate_split(const RegexAst& ast, const Dfa& truth, const GenConfig& cfg, std::size_t size,
                     std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n_pos = (size + 1) / 2;
  const std::size_t n_neg = size - n_pos;
  std::set<Word> seen;
  const bool dedup = cfg.dedup == DedupPolicy::WithinSplit;
  auto fresh = [&](const Word& w) { return !dedup || seen.insert(w).second; };

  Split split;
  split.reserve(size);
  std::vector<std::size_t> pos_index;
  for (std::size_t i = 0; i < n_pos; ++i) {
    for (int tries = 0;; ++tries) {
      if (tries >= kSampleBudget) throw BudgetError("could not draw enough distinct positives");
      Word w = sample_positive(ast, truth, rng, cfg.star_p, cfg.max_len);
      if (!fresh(w)) continue;
      split.push_back({std::move(w), 1, Origin::Positive});
      break;
    }
  }
  if (n_neg > 0 && n_pos == 0) throw Error("cannot draw negatives for a split without positives");

  for (std::size_t i = 0; i < n_neg; ++i) {
    bool done = false;
    for (int tries = 0; tries < kLengthRetries && !done; ++tries) {
      const Word& base = split[rng.below(n_pos)].tokens;
      try {
        Word w = cfg.method == NegativeMethod::Random
                     ? sample_negative_random(ast.alphabet, static_cast<int>(base.size()), truth, rng, 1000)
                     : sample_negative_perturb(base, truth, rng, 1000);
        if (!fresh(w)) continue;
        split.push_back({std::move(w), 0,
                         cfg.method == NegativeMethod::Random ? Origin::RandomNegative : Origin::PerturbedNegative});
        done = true;
      } catch (const BudgetError&) {
        // another base string / length
      }
    }
    if (!done) throw BudgetError("negative sampling budget exhausted; the language may have no complement");
  }
  rng.shuffle(split);
  return split;
}

}  // namespace

Dataset generate_dataset(std::string_view regex, const Alphabet& alphabet, const GenConfig& config) {
  config.validate();
  const RegexAst ast = parse_regex(regex, alphabet);
  const Dfa truth = minimize(determinize(compile_nfa(ast)));
  Dataset ds;
  ds.regex = std::string(regex);
  ds.alphabet = alphabet;
  ds.seed = config.seed;
  ds.config = config;
  ds.train = generate_split(ast, truth, config, config.train_size, derive_seed(config.seed, "train"));
  ds.validation = generate_split(ast, truth, config, config.validation_size, derive_seed(config.seed, "validation"));
  ds.test = generate_split(ast, truth, config, config.test_size, derive_seed(config.seed, "test"));
  return ds;
}

std::size_t audit_labels(const Dataset& dataset, const Dfa& truth) {
  std::size_t bad = 0;
  for (const Split* s : {&dataset.train, &dataset.validation, &dataset.test})
    for (const auto& ls : *s) bad += (accepts(truth, ls.tokens) ? 1 : 0) != ls.label;
  return bad;
}

// --- persistence ------------------------------------------------------------------

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string format_split(const Split& split, const Alphabet& alphabet, const SplitHeader& header) {
  std::string out = "# regex=" + header.regex + " seed=" + std::to_string(header.seed) + " split=" + header.split +
                    " method=" + header.method + "\n";
  for (const auto& ls : split) {
    out += ls.label ? '1' : '0';
    out += '\t';
    out += alphabet.format(ls.tokens);
    out += '\n';
  }
  return out;
}

namespace {

SplitHeader parse_header(const std::string& line, std::string_view source) {
  const std::string src(source);
  SplitHeader h;
  auto take = [&](std::string& rest, const std::string& key) {
    auto pos = rest.rfind(" " + key + "=");
    if (pos == std::string::npos) throw ParseError(src, 1, "header is missing '" + key + "='");
    std::string value = rest.substr(pos + key.size() + 2);
    rest.erase(pos);
    return value;
  };
  if (line.rfind("# regex=", 0) != 0) throw ParseError(src, 1, "expected '# regex=...' header");
  std::string rest = line;
  h.method = take(rest, "method");
  h.split = take(rest, "split");
  const std::string seed = take(rest, "seed");
  try {
    std::size_t used = 0;
    h.seed = std::stoull(seed, &used);
    if (used != seed.size()) throw std::invalid_argument(seed);
  } catch (const std::exception&) {
    throw ParseError(src, 1, "bad seed '" + seed + "'");
  }
  h.regex = rest.substr(std::string("# regex=").size());
  return h;
}

}  // namespace

Split parse_split(std::string_view text, const Alphabet& alphabet, SplitHeader* header_out, std::string_view source) {
  const std::string src(source);
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  Split split;
  SplitHeader header;
  bool have_header = false;
  Origin negative_origin = Origin::RandomNegative;
  while (std::getline(in, line)) {
    ++lineno;
    if (!have_header) {
      header = parse_header(line, source);
      have_header = true;
      if (header.method == "perturb") negative_origin = Origin::PerturbedNegative;
      continue;
    }
    if (line.empty()) throw ParseError(src, lineno, "empty line (expected '<label>\\t<tokens>')");
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(src, lineno, "missing tab after label");
    const std::string label = line.substr(0, tab);
    if (label != "0" && label != "1") throw ParseError(src, lineno, "label must be 0 or 1, got '" + label + "'");
    LabeledString ls;
    ls.label = label == "1";
    ls.origin = ls.label ? Origin::Positive : negative_origin;
    try {
      ls.tokens = alphabet.parse(std::string_view(line).substr(tab + 1));
    } catch (const UnknownTokenError& e) {
      throw ParseError(src, lineno, e.what());
    }
    split.push_back(std::move(ls));
  }
  if (!have_header) throw ParseError(src, 1, "empty corpus file");
  if (header_out) *header_out = header;
  return split;
}

void write_split(const std::filesystem::path& path, const Split& split, const Alphabet& alphabet,
                 const SplitHeader& header) {
  write_file(path, format_split(split, alphabet, header));
}

Split read_split(const std::filesystem::path& path, const Alphabet& alphabet, SplitHeader* header) {
  return parse_split(read_file(path), alphabet, header, path.string());
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string method = to_string(ds.config.method);
  write_split(dir / "train.tsv", ds.train, ds.alphabet, {ds.regex, ds.seed, "train", method});
  write_split(dir / "validation.tsv", ds.validation, ds.alphabet, {ds.regex, ds.seed, "validation", method});
  write_split(dir / "test.tsv", ds.test, ds.alphabet, {ds.regex, ds.seed, "test", method});
  nlohmann::ordered_json meta;
  meta["regex"] = ds.regex;
  meta["alphabet"] = ds.alphabet.tokens();
  meta["seed"] = ds.seed;
  meta["train_size"] = ds.config.train_size;
  meta["validation_size"] = ds.config.validation_size;
  meta["test_size"] = ds.config.test_size;
  meta["method"] = method;
  meta["star_p"] = ds.config.star_p;
  meta["max_len"] = ds.config.max_len;
  meta["dedup"] = to_string(ds.config.dedup);
  write_file(dir / "dataset.json", meta.dump(2) + "\n");
}

Dataset load_dataset(const std::filesystem::path& dir) {
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(dir / "dataset.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error((dir / "dataset.json").string() + ": " + e.what());
  }
  Dataset ds;
  try {
    ds.regex = meta.at("regex").get<std::string>();
    ds.alphabet = Alphabet(meta.at("alphabet").get<std::vector<std::string>>());
    ds.seed = meta.at("seed").get<std::uint64_t>();
    ds.config.seed = ds.seed;
    ds.config.train_size = meta.at("train_size").get<std::size_t>();
    ds.config.validation_size = meta.at("validation_size").get<std::size_t>();
    ds.config.test_size = meta.at("test_size").get<std::size_t>();
    ds.config.method = parse_negative_method(meta.at("method").get<std::string>());
    ds.config.star_p = meta.at("star_p").get<double>();
    ds.config.max_len = meta.at("max_len").get<int>();
    ds.config.dedup = parse_dedup_policy(meta.at("dedup").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error((dir / "dataset.json").string() + ": " + e.what());
  }
  ds.train = read_split(dir / "train.tsv", ds.alphabet);
  ds.validation = read_split(dir / "validation.tsv", ds.alphabet);
  ds.test = read_split(dir / "test.tsv", ds.alphabet);
  return ds;
}

}  // namespace rgi
