#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "gradcheck.hpp"
#include "rgi/error.hpp"
#include "rgi/rnn.hpp"

using namespace rgi;

namespace {

const Alphabet kBinary({"0", "1"});

RnnParams random_params(int h, int m, Rng& rng, double scale = 1.0) {
  TrainConfig cfg;
  cfg.hidden = h;
  cfg.head = m;
  RnnParams p = init_params(kBinary, cfg, rng);
  p.for_each([&](std::string_view, std::span<double> t) {
    for (double& x : t) x = scale * rng.uniform(-1, 1);
  });
  return p;
}

std::vector<LabeledString> random_batch(Rng& rng, std::size_t n, int max_len) {
  std::vector<LabeledString> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledString ls;
    const auto len = rng.below(static_cast<std::uint64_t>(max_len) + 1);
    for (std::uint64_t t = 0; t < len; ++t) ls.tokens.push_back(static_cast<Symbol>(rng.below(2)));
    ls.label = static_cast<int>(rng.below(2));
    out.push_back(ls);
  }
  return out;
}

}  // namespace

TEST_CASE("init_params") {
  TrainConfig cfg;
  cfg.hidden = 10;
  cfg.head = 10;
  Rng r1(7), r2(7);
  auto a = init_params(kBinary, cfg, r1);
  auto b = init_params(kBinary, cfg, r2);
  CHECK(a == b);
  CHECK(a.v.isZero(0));
  CHECK(a.c.isZero(0));
  CHECK(a.d == 0.0);
  CHECK(a.W.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 20.0));
  CHECK(a.U.rows() == 10);
  CHECK(a.U.cols() == 2);
  CHECK(a.A.size() == 10);
}

TEST_CASE("forward") {
  auto zero = RnnParams::zeros(kBinary, 5, 4);
  auto t = forward(zero, {0, 1, 1});
  REQUIRE(t.states.size() == 4);
  for (const auto& s : t.states) CHECK(s.isZero(0));
  CHECK(t.prediction == 0.5);

  Rng rng(1);
  auto p = random_params(6, 4, rng, 3.0);
  auto e = forward(p, {});
  CHECK(e.states.size() == 1);
  CHECK(e.prediction == doctest::Approx(predict_from_state(p, Eigen::VectorXd::Zero(6))));

  auto long_trace = forward(p, Word(30, 1));
  for (std::size_t i = 1; i < long_trace.states.size(); ++i) CHECK(long_trace.states[i].cwiseAbs().maxCoeff() <= 1.0);
  CHECK(long_trace.prediction > 0.0);
  CHECK(long_trace.prediction < 1.0);

  CHECK_THROWS_AS(forward(p, {0, 2}), UnknownTokenError);
}

TEST_CASE("loss") {
  CHECK(loss(std::vector<double>{0.5, 0.5}, std::vector<int>{1, 0}) == doctest::Approx(std::log(2.0)));
  CHECK(loss(std::vector<double>{1 - 1e-12, 1e-12}, std::vector<int>{1, 0}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(loss(std::vector<double>{0.9}, std::vector<int>{0}) == doctest::Approx(-std::log(0.1)));
  CHECK(std::isfinite(loss(std::vector<double>{0.0}, std::vector<int>{1})));
  CHECK_THROWS_AS(loss(std::vector<double>{0.5}, std::vector<int>{1, 0}), Error);
}

TEST_CASE("backward matches finite differences") {
  Rng rng(20240);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = 1 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(4));
    auto p = random_params(h, m, rng, 0.8);
    auto batch = random_batch(rng, 1 + rng.below(4), 5);
    auto g = backward(p, batch);
    CHECK(g.loss == doctest::Approx(oracle::batch_loss(p, batch)));
    const double err = oracle::max_relative_error(oracle::flatten(g.grad), oracle::numeric_gradient(p, batch));
    CHECK(err < 1e-4);
  }
}

TEST_CASE("backward structure") {
  Rng rng(4);
  auto p = random_params(4, 3, rng);
  std::vector<LabeledString> empty_string{{{}, 1, Origin::Positive}};
  auto g = backward(p, empty_string);
  CHECK(g.grad.W.isZero(0));
  CHECK(g.grad.U.isZero(0));
  CHECK(g.grad.v.isZero(0));
  CHECK_FALSE(g.grad.A.isZero(0));

  // Saturated correct prediction: clamp active, gradient exactly zero.
  p.d = 100.0;
  std::vector<LabeledString> batch{{{0, 1}, 1, Origin::Positive}, {{1}, 1, Origin::Positive}};
  auto flat = backward(p, batch);
  CHECK(flat.grad.A.isZero(0));
  CHECK(flat.grad.d == 0.0);
  CHECK(flat.grad.B.isZero(0));
}

TEST_CASE("adam_step") {
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  auto p = RnnParams::zeros(kBinary, 3, 2);
  auto g = p.zeros_like();
  g.for_each([](std::string_view, std::span<double> t) {
    for (double& x : t) x = 0.37;
  });
  auto state = make_adam_state(p);
  auto q = p;
  adam_step(q, g, state, cfg);
  q.for_each([&](std::string_view, std::span<const double> t) {
    for (double x : t) CHECK(x == doctest::Approx(-0.01).epsilon(1e-6));
  });

  auto zero_state = make_adam_state(p);
  auto r = p;
  adam_step(r, p.zeros_like(), zero_state, cfg);
  CHECK(r == p);

  auto s1 = make_adam_state(p), s2 = make_adam_state(p);
  auto a = p, b = p;
  adam_step(a, g, s1, cfg);
  adam_step(b, g, s2, cfg);
  CHECK(a == b);
  CHECK(s1.step == 1);
}

TEST_CASE("clip_gradients") {
  auto g = RnnParams::zeros(kBinary, 2, 2);
  g.d = 10.0;
  CHECK(clip_gradients(g, 5.0) == doctest::Approx(10.0));
  CHECK(g.d == doctest::Approx(5.0));
  g.d = 1.0;
  clip_gradients(g, 5.0);
  CHECK(g.d == 1.0);
}

TEST_CASE("evaluate") {
  auto p = RnnParams::zeros(kBinary, 3, 2);
  p.d = 1.0;  // predicts > 0.5 everywhere
  std::vector<LabeledString> ones{{{0}, 1, Origin::Positive}, {{1, 1}, 1, Origin::Positive}};
  CHECK(evaluate(p, ones) == 1.0);
  CHECK_THROWS_AS(evaluate(p, std::vector<LabeledString>{}), Error);

  Rng rng(8);
  auto q = random_params(5, 3, rng);
  auto batch = random_batch(rng, 200, 6);
  auto flipped = batch;
  for (auto& ls : flipped) ls.label = 1 - ls.label;
  CHECK(evaluate(q, batch) + evaluate(q, flipped) == doctest::Approx(1.0));

  // Random networks are at chance on a balanced set: 0.5 +- 0.03.
  Rng data_rng(31);
  std::vector<LabeledString> balanced;
  for (int i = 0; i < 10'000; ++i) {
    LabeledString ls;
    const auto len = 1 + data_rng.below(8);
    for (std::uint64_t t = 0; t < len; ++t) ls.tokens.push_back(static_cast<Symbol>(data_rng.below(2)));
    ls.label = i % 2;
    balanced.push_back(ls);
  }
  TrainConfig cfg;
  Rng init(77);
  CHECK(std::abs(evaluate(init_params(kBinary, cfg, init), balanced) - 0.5) <= 0.03);
}

TEST_CASE("train") {
  GenConfig gen;
  gen.train_size = 2000;
  gen.validation_size = 500;
  gen.test_size = 10;
  auto ds = generate_dataset("(01)*", kBinary, gen);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.learning_rate = 0.01;
  cfg.target_accuracy = 1.01;  // never stop early
  auto r1 = train(ds, cfg);
  CHECK(r1.history.size() == 3);
  for (const auto& e : r1.history) {
    CHECK(e.val_accuracy >= 0.0);
    CHECK(e.val_accuracy <= 1.0);
  }
  CHECK(r1.history.back().train_loss < r1.initial_train_loss);
  auto r2 = train(ds, cfg);
  CHECK(r1.params == r2.params);

  cfg.seed = 7;
  CHECK_FALSE(train(ds, cfg).params == r1.params);

  cfg.epochs = 0;
  CHECK_THROWS_AS(train(ds, cfg), Error);
}

TEST_CASE("params file round trip") {
  Rng rng(12);
  auto p = random_params(4, 3, rng);
  p.alphabet = Alphabet({"Det", "Adj", "Noun", "Verb"});
  p.U = Eigen::MatrixXd::Random(4, 4);
  CHECK(parse_params(format_params(p)) == p);
  CHECK(format_params(p).rfind("rnn-params v1 H=4 D=4 M=3 alphabet=Det,Adj,Noun,Verb\n", 0) == 0);
  auto text = format_params(p);
  text.replace(text.find("\nv "), 3, "\nx ");
  CHECK_THROWS_AS(parse_params(text), ParseError);

  auto path = std::filesystem::temp_directory_path() / "rgi_params_test.txt";
  save_params(p, path);
  CHECK(load_params(path) == p);

  auto hist = history_json({{1, 0.5, 0.75, 0}});
  CHECK(hist.find("\"val_accuracy\": 0.75") != std::string::npos);
}
