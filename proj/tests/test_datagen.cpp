#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "rgi/datagen.hpp"
#include "rgi/error.hpp"

using namespace rgi;
namespace fs = std::filesystem;

namespace {

const Alphabet kBinary({"0", "1"});
const Alphabet kPos({"Det", "Adj", "Noun", "Verb"});
const char* kPosRegex = "Det? Adj* Noun Verb (Det? Adj* Noun)?";

Dfa truth_of(const char* pattern, const Alphabet& a) { return minimize(regex_to_dfa(pattern, a)); }

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rgi_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double max_cdf_gap(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t top = std::max(a.back(), b.back());
  double gap = 0;
  for (std::size_t x = 0; x <= top; ++x) {
    const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / static_cast<double>(a.size());
    const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / static_cast<double>(b.size());
    gap = std::max(gap, std::abs(fa - fb));
  }
  return gap;
}

}  // namespace

TEST_CASE("sample_positive") {
  Rng rng(5);
  auto ast = parse_regex("(01)*", kBinary);
  auto truth = truth_of("(01)*", kBinary);
  for (int i = 0; i < 200; ++i) {
    Word w = sample_positive(ast, truth, rng, 0.5, 20);
    CHECK(w.size() <= 20);
    CHECK(w.size() % 2 == 0);
    CHECK(accepts(truth, w));
  }

  auto nv = parse_regex("Noun Verb", kPos);
  auto nv_truth = truth_of("Noun Verb", kPos);
  CHECK(sample_positive(nv, nv_truth, rng, 0.3, 10) == kPos.encode(std::vector<std::string>{"Noun", "Verb"}));

  // Star repetitions are geometric with mean p/(1-p) = 1 at p = 0.5.
  auto star = parse_regex("0*", kBinary);
  auto star_truth = truth_of("0*", kBinary);
  double total = 0;
  for (int i = 0; i < 10'000; ++i) total += static_cast<double>(sample_positive(star, star_truth, rng, 0.5, 1000).size());
  CHECK(total / 10'000 == doctest::Approx(1.0).epsilon(0.05));

  // Shortest string is longer than max_len.
  auto long_ast = parse_regex("0000", kBinary);
  CHECK_THROWS_AS(sample_positive(long_ast, truth_of("0000", kBinary), rng, 0.5, 3), BudgetError);
}

TEST_CASE("sample_negative_random") {
  Rng rng(11);
  auto b = truth_of("(0|1)*100", kBinary);
  std::set<Word> seen;
  for (int i = 0; i < 500; ++i) {
    Word w = sample_negative_random(kBinary, 3, b, rng);
    CHECK(w.size() == 3);
    CHECK(w != Word{1, 0, 0});
    seen.insert(w);
  }
  CHECK(seen.size() == 7);

  auto a = truth_of("(01)*", kBinary);
  CHECK_THROWS_AS(sample_negative_random(kBinary, 0, a, rng), BudgetError);

  // Brute force: the length-2 strings outside (01)*.
  std::set<Word> expected;
  for (const auto& w : oracle::all_words(2, 2))
    if (w.size() == 2 && !oracle::walk(a, w)) expected.insert(w);
  CHECK(expected == std::set<Word>{{0, 0}, {1, 0}, {1, 1}});
  for (int i = 0; i < 100; ++i) CHECK(expected.count(sample_negative_random(kBinary, 2, a, rng)) == 1);
}

TEST_CASE("sample_negative_perturb") {
  Rng rng(3);
  auto a = truth_of("(01)*", kBinary);
  for (int i = 0; i < 50; ++i) {
    Word w = sample_negative_perturb({0, 1}, a, rng);
    CHECK_FALSE(accepts(a, w));
  }

  auto pos = truth_of(kPosRegex, kPos);
  Word dnv = kPos.encode(std::vector<std::string>{"Det", "Noun", "Verb"});
  Word moved = apply_edit(dnv, {Edit::Kind::Move, 2, 0, 0});
  CHECK(moved == kPos.encode(std::vector<std::string>{"Verb", "Det", "Noun"}));
  CHECK_FALSE(accepts(pos, moved));

  CHECK(apply_edit({0, 1}, {Edit::Kind::Delete, 0, 0, 0}) == Word{1});
  CHECK(apply_edit({0, 1}, {Edit::Kind::Insert, 0, 2, 1}) == Word{0, 1, 1});

  auto ast = parse_regex(kPosRegex, kPos);
  for (int i = 0; i < 1000; ++i) {
    Word base = sample_positive(ast, pos, rng, 0.5, 12);
    Word w = sample_negative_perturb(base, pos, rng);
    REQUIRE_FALSE(accepts(pos, w));
    REQUIRE(std::abs(static_cast<int>(w.size()) - static_cast<int>(base.size())) <= 3);
  }
}

TEST_CASE("generate_dataset contract") {
  GenConfig cfg;
  cfg.seed = 42;
  auto ds = generate_dataset("(01)*", kBinary, cfg);
  CHECK(ds.train.size() == 15'000);
  CHECK(ds.validation.size() == 10'000);
  CHECK(ds.test.size() == 10'000);
  auto positives = [](const Split& s) { return std::count_if(s.begin(), s.end(), [](auto& x) { return x.label == 1; }); };
  CHECK(positives(ds.train) == 7'500);
  CHECK(positives(ds.validation) == 5'000);
  CHECK(positives(ds.test) == 5'000);
  CHECK(audit_labels(ds, truth_of("(01)*", kBinary)) == 0);

  CHECK(generate_dataset("(01)*", kBinary, cfg) == ds);
  cfg.seed = 43;
  CHECK_FALSE(generate_dataset("(01)*", kBinary, cfg) == ds);

  GenConfig odd;
  odd.train_size = 7;
  odd.validation_size = 1;
  odd.test_size = 0;
  auto small = generate_dataset("(0|1)*100", kBinary, odd);
  CHECK(positives(small.train) == 4);
  CHECK(small.validation.size() == 1);
  CHECK(small.test.empty());

  GenConfig all;
  all.train_size = 10;
  CHECK_THROWS_AS(generate_dataset("(0|1)*", kBinary, all), BudgetError);

  GenConfig bad;
  bad.star_p = 1.0;
  CHECK_THROWS_AS(generate_dataset("(01)*", kBinary, bad), Error);
}

TEST_CASE("random negatives follow the positive length distribution") {
  GenConfig cfg;
  cfg.train_size = 10;
  cfg.test_size = 10;
  cfg.validation_size = 10'000;
  auto ds = generate_dataset("(0|1)*100", kBinary, cfg);
  std::vector<std::size_t> pos_len, neg_len;
  for (const auto& ls : ds.validation) (ls.label ? pos_len : neg_len).push_back(ls.tokens.size());
  CHECK(max_cdf_gap(pos_len, neg_len) < 0.05);
}

TEST_CASE("perturb method and dedup") {
  GenConfig cfg;
  cfg.train_size = 600;
  cfg.validation_size = 200;
  cfg.test_size = 200;
  cfg.method = NegativeMethod::Perturb;
  cfg.max_len = 12;
  auto ds = generate_dataset(kPosRegex, kPos, cfg);
  CHECK(audit_labels(ds, truth_of(kPosRegex, kPos)) == 0);
  for (const auto& ls : ds.train)
    if (!ls.label) CHECK(ls.origin == Origin::PerturbedNegative);

  cfg.dedup = DedupPolicy::WithinSplit;
  cfg.train_size = 150;
  auto dd = generate_dataset(kPosRegex, kPos, cfg);
  std::set<Word> uniq;
  for (const auto& ls : dd.train) uniq.insert(ls.tokens);
  CHECK(uniq.size() == dd.train.size());
}

TEST_CASE("save and load") {
  GenConfig cfg;
  cfg.train_size = 300;
  cfg.validation_size = 100;
  cfg.test_size = 100;
  auto ds = generate_dataset("(01)*", kBinary, cfg);
  auto dir = temp_dir("datagen_roundtrip");
  save_dataset(ds, dir);
  CHECK(load_dataset(dir) == ds);
  const auto text = read_file(dir / "train.tsv");
  CHECK(text.rfind("# regex=(01)* seed=42 split=train method=random\n", 0) == 0);
  CHECK(text.find("\n1\t\n") != std::string::npos);  // empty string line

  // Saving again produces identical bytes.
  auto dir2 = temp_dir("datagen_roundtrip2");
  save_dataset(generate_dataset("(01)*", kBinary, cfg), dir2);
  CHECK(read_file(dir2 / "train.tsv") == text);

  auto pos_ds = generate_dataset(kPosRegex, kPos, cfg);
  SplitHeader h;
  auto parsed = parse_split(format_split(pos_ds.test, kPos, {kPosRegex, 42, "test", "random"}), kPos, &h);
  CHECK(parsed == pos_ds.test);
  CHECK(h.regex == kPosRegex);
  CHECK(h.split == "test");

  try {
    parse_split("# regex=(01)* seed=1 split=train method=random\n1\t0 1\n2\t0\n", kBinary, nullptr, "bad.tsv");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("bad.tsv:3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_split("1\t0\n", kBinary), ParseError);
  CHECK_THROWS_AS(parse_split("# regex=0 seed=1 split=t method=random\n1\t2\n", kBinary), ParseError);
}
