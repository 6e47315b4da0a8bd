#include "rgi/rnn.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "rgi/error.hpp"

namespace rgi {

// --- parameter container ---------------------------------------------------------

RnnParams RnnParams::zeros(const Alphabet& alphabet, int hidden, int head) {
  RnnParams p;
  p.alphabet = alphabet;
  const auto d = static_cast<Eigen::Index>(alphabet.size());
  p.W = Eigen::MatrixXd::Zero(hidden, hidden);
  p.U = Eigen::MatrixXd::Zero(hidden, d);
  p.v = Eigen::VectorXd::Zero(hidden);
  p.B = Eigen::MatrixXd::Zero(head, hidden);
  p.c = Eigen::VectorXd::Zero(head);
  p.A = Eigen::RowVectorXd::Zero(head);
  p.d = 0.0;
  return p;
}

namespace {

template <class M>
std::span<double> flat(M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
template <class M>
std::span<const double> flat(const M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

void RnnParams::for_each(const std::function<void(std::string_view, std::span<double>)>& fn) {
  fn("W", flat(W));
  fn("U", flat(U));
  fn("v", flat(v));
  fn("B", flat(B));
  fn("c", flat(c));
  fn("A", flat(A));
  fn("d", std::span<double>(&d, 1));
}

void RnnParams::for_each(const std::function<void(std::string_view, std::span<const double>)>& fn) const {
  fn("W", flat(W));
  fn("U", flat(U));
  fn("v", flat(v));
  fn("B", flat(B));
  fn("c", flat(c));
  fn("A", flat(A));
  fn("d", std::span<const double>(&d, 1));
}

std::size_t RnnParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](std::string_view, std::span<const double> t) { n += t.size(); });
  return n;
}

bool RnnParams::all_finite() const {
  bool ok = true;
  for_each([&](std::string_view, std::span<const double> t) {
    for (double x : t) ok = ok && std::isfinite(x);
  });
  return ok;
}

bool operator==(const RnnParams& a, const RnnParams& b) {
  return a.alphabet == b.alphabet && a.W == b.W && a.U == b.U && a.v == b.v && a.B == b.B && a.c == b.c &&
         a.A == b.A && a.d == b.d;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (!(learning_rate > 0) || !(adam_epsilon > 0)) throw Error("learning rate and Adam epsilon must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw Error("Adam betas must be in [0,1)");
  if (batch_size < 1) throw Error("batch size must be >= 1");
  if (hidden < 1 || head < 1) throw Error("hidden and head widths must be >= 1");
}

// --- forward ------------------------------------------------------------------------

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
}

void check_symbol(const RnnParams& p, Symbol s) {
  if (s < 0 || s >= p.input()) throw UnknownTokenError("#" + std::to_string(s));
}

void fill_uniform(Eigen::MatrixXd& m, double r, Rng& rng) {
  // Row-major fill so the draw order matches the file layout.
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-r, r);
}

}  // namespace

RnnParams init_params(const Alphabet& alphabet, const TrainConfig& config, Rng& rng) {
  RnnParams p = RnnParams::zeros(alphabet, config.hidden, config.head);
  const double h = config.hidden, m = config.head, d = static_cast<double>(alphabet.size());
  fill_uniform(p.W, std::sqrt(6.0 / (h + h)), rng);
  fill_uniform(p.U, std::sqrt(6.0 / (d + h)), rng);
  fill_uniform(p.B, std::sqrt(6.0 / (h + m)), rng);
  Eigen::MatrixXd a(1, config.head);
  fill_uniform(a, std::sqrt(6.0 / (m + 1.0)), rng);
  p.A = a.row(0);
  return p;
}

Eigen::VectorXd step(const RnnParams& p, const Eigen::VectorXd& state, Symbol symbol) {
  check_symbol(p, symbol);
  return (p.W * state + p.U.col(symbol) + p.v).array().tanh().matrix();
}

double predict_from_state(const RnnParams& p, const Eigen::VectorXd& state) {
  const Eigen::VectorXd h = sigmoid(p.B * state + p.c);
  return sigmoid(p.A.dot(h) + p.d);
}

StateTrace forward(const RnnParams& p, const Word& word) {
  StateTrace t;
  t.states.reserve(word.size() + 1);
  t.states.push_back(Eigen::VectorXd::Zero(p.hidden()));
  for (Symbol s : word) t.states.push_back(step(p, t.states.back(), s));
  t.head_hidden = sigmoid(p.B * t.states.back() + p.c);
  t.prediction = sigmoid(p.A.dot(t.head_hidden) + p.d);
  return t;
}

double predict(const RnnParams& p, const Word& word) { return forward(p, word).prediction; }

double loss(std::span<const double> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw Error("loss: " + std::to_string(predictions.size()) + " predictions vs " + std::to_string(labels.size()) +
                " labels");
  if (predictions.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double y = std::clamp(predictions[i], kLossClamp, 1.0 - kLossClamp);
    total -= labels[i] ? std::log(y) : std::log(1.0 - y);
  }
  return total / static_cast<double>(predictions.size());
}

// --- backward -----------------------------------------------------------------------

Gradients backward(const RnnParams& p, std::span<const LabeledString> batch) {
  Gradients out{p.zeros_like(), 0.0};
  if (batch.empty()) return out;
  RnnParams& g = out.grad;
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (const auto& example : batch) {
    const StateTrace t = forward(p, example.tokens);
    const double y = std::clamp(t.prediction, kLossClamp, 1.0 - kLossClamp);
    out.loss -= (example.label ? std::log(y) : std::log(1.0 - y)) * scale;
    // d loss / d logit; zero where the clamp is active.
    const bool clamped = t.prediction < kLossClamp || t.prediction > 1.0 - kLossClamp;
    const double delta = clamped ? 0.0 : (t.prediction - example.label) * scale;
    if (delta == 0.0) continue;

    g.A += delta * t.head_hidden.transpose();
    g.d += delta;
    const Eigen::VectorXd dz_head =
        (delta * p.A.transpose()).cwiseProduct(t.head_hidden.cwiseProduct(Eigen::VectorXd::Ones(p.head()) - t.head_hidden));
    g.B += dz_head * t.states.back().transpose();
    g.c += dz_head;
    Eigen::VectorXd ds = p.B.transpose() * dz_head;
    for (std::size_t i = example.tokens.size(); i >= 1; --i) {
      const Eigen::VectorXd& s = t.states[i];
      const Eigen::VectorXd da = ds.cwiseProduct((1.0 - s.array().square()).matrix());
      g.W += da * t.states[i - 1].transpose();
      g.U.col(example.tokens[i - 1]) += da;
      g.v += da;
      ds = p.W.transpose() * da;
    }
  }
  return out;
}

// --- optimizer ----------------------------------------------------------------------

AdamState make_adam_state(const RnnParams& params) { return {params.zeros_like(), params.zeros_like(), 0}; }

void adam_step(RnnParams& params, const RnnParams& grad, AdamState& state, const TrainConfig& cfg) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  std::vector<std::span<const double>> gs;
  grad.for_each([&](std::string_view, std::span<const double> t) { gs.push_back(t); });
  std::vector<std::span<double>> ms, us;
  state.m.for_each([&](std::string_view, std::span<double> t) { ms.push_back(t); });
  state.u.for_each([&](std::string_view, std::span<double> t) { us.push_back(t); });
  std::size_t k = 0;
  params.for_each([&](std::string_view, std::span<double> theta) {
    auto g = gs[k];
    auto m = ms[k];
    auto u = us[k];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      u[i] = cfg.beta2 * u[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double u_hat = u[i] / bc2;
      theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(u_hat) + cfg.adam_epsilon);
    }
    ++k;
  });
}

double clip_gradients(RnnParams& grad, double max_norm) {
  double sq = 0.0;
  grad.for_each([&](std::string_view, std::span<const double> t) {
    for (double x : t) sq += x * x;
  });
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const double f = max_norm / norm;
    grad.for_each([&](std::string_view, std::span<double> t) {
      for (double& x : t) x *= f;
    });
  }
  return norm;
}

// --- training -----------------------------------------------------------------------

double evaluate(const RnnParams& params, std::span<const LabeledString> strings) {
  if (strings.empty()) throw Error("evaluate: empty string set");
  std::size_t correct = 0;
  for (const auto& ls : strings) correct += (predict(params, ls.tokens) >= 0.5 ? 1 : 0) == ls.label;
  return static_cast<double>(correct) / static_cast<double>(strings.size());
}

double dataset_loss(const RnnParams& params, std::span<const LabeledString> strings) {
  std::vector<double> preds;
  std::vector<int> labels;
  preds.reserve(strings.size());
  labels.reserve(strings.size());
  for (const auto& ls : strings) {
    preds.push_back(predict(params, ls.tokens));
    labels.push_back(ls.label);
  }
  return loss(preds, labels);
}

TrainResult train(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (dataset.train.empty()) throw Error("train: empty training split");
  if (dataset.validation.empty()) throw Error("train: empty validation split");

  Rng init_rng(derive_seed(config.seed, "init"));
  Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
  RnnParams params = init_params(dataset.alphabet, config, init_rng);
  AdamState adam = make_adam_state(params);

  TrainResult result;
  result.initial_train_loss = dataset_loss(params, dataset.train);
  result.params = params;
  result.best_val_accuracy = -1.0;

  std::vector<std::size_t> order(dataset.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<LabeledString> batch;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    EpochRecord rec;
    rec.epoch = epoch;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(dataset.train[order[i]]);
      Gradients g = backward(params, batch);
      if (!std::isfinite(g.loss) || !g.grad.all_finite())
        throw TrainingError("non-finite loss or gradient in epoch " + std::to_string(epoch) + " (batch starting at " +
                            std::to_string(begin) + ")");
      if (clip_gradients(g.grad, config.clip_norm) > config.clip_norm && config.clip_norm > 0) ++rec.clipped_steps;
      adam_step(params, g.grad, adam, config);
    }
    if (!params.all_finite()) throw TrainingError("parameters became non-finite in epoch " + std::to_string(epoch));
    rec.train_loss = dataset_loss(params, dataset.train);
    if (!std::isfinite(rec.train_loss)) throw TrainingError("non-finite training loss after epoch " + std::to_string(epoch));
    rec.val_accuracy = evaluate(params, dataset.validation);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = rec.val_accuracy;
      result.best_epoch = epoch;
      result.params = params;
    }
    if (rec.val_accuracy >= config.target_accuracy) break;
  }
  return result;
}

// --- persistence ----------------------------------------------------------------------

namespace {

void append_number(std::string& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void append_tensor(std::string& out, std::string_view name, const Eigen::MatrixXd& m) {
  out += name;
  out += ' ' + std::to_string(m.rows()) + ' ' + std::to_string(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out += ' ';
      append_number(out, m(i, j));
    }
  out += '\n';
}

}  // namespace

std::string format_params(const RnnParams& p) {
  std::string out = "rnn-params v1 H=" + std::to_string(p.hidden()) + " D=" + std::to_string(p.input()) +
                    " M=" + std::to_string(p.head()) + " alphabet=" + p.alphabet.join() + "\n";
  append_tensor(out, "W", p.W);
  append_tensor(out, "U", p.U);
  append_tensor(out, "v", p.v);
  append_tensor(out, "B", p.B);
  append_tensor(out, "c", p.c);
  append_tensor(out, "A", p.A);
  append_tensor(out, "d", Eigen::MatrixXd::Constant(1, 1, p.d));
  return out;
}

RnnParams parse_params(std::string_view text, std::string_view source) {
  const std::string src(source);
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ParseError(src, 1, "empty parameter file");
  auto words = split_words(line);
  if (words.size() != 6 || words[0] != "rnn-params" || words[1] != "v1")
    throw ParseError(src, 1, "expected 'rnn-params v1 H=.. D=.. M=.. alphabet=..'");
  auto field = [&](const std::string& w, const std::string& key) {
    if (w.rfind(key + "=", 0) != 0) throw ParseError(src, 1, "expected " + key + "=");
    return w.substr(key.size() + 1);
  };
  int h = 0, d = 0, m = 0;
  try {
    h = std::stoi(field(words[2], "H"));
    d = std::stoi(field(words[3], "D"));
    m = std::stoi(field(words[4], "M"));
  } catch (const std::invalid_argument&) {
    throw ParseError(src, 1, "bad dimension");
  }
  std::vector<std::string> tokens;
  {
    std::string list = field(words[5], "alphabet");
    std::size_t pos = 0;
    while (pos <= list.size()) {
      auto comma = list.find(',', pos);
      tokens.push_back(list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  RnnParams p = RnnParams::zeros(Alphabet(tokens), h, m);
  if (p.input() != d) throw ParseError(src, 1, "D does not match alphabet size");

  std::size_t lineno = 1;
  auto read_tensor = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    ++lineno;
    if (!std::getline(in, line)) throw ParseError(src, lineno, "missing tensor " + name);
    std::istringstream ls(line);
    std::string got;
    Eigen::Index r = 0, c = 0;
    if (!(ls >> got >> r >> c) || got != name) throw ParseError(src, lineno, "expected tensor " + name);
    if (r != rows || c != cols) throw ParseError(src, lineno, "tensor " + name + " has wrong shape");
    Eigen::MatrixXd t(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        std::string num;
        if (!(ls >> num)) throw ParseError(src, lineno, "tensor " + name + " is short");
        try {
          t(i, j) = std::stod(num);
        } catch (const std::exception&) {
          throw ParseError(src, lineno, "bad number '" + num + "'");
        }
      }
    std::string extra;
    if (ls >> extra) throw ParseError(src, lineno, "trailing data in tensor " + name);
    return t;
  };
  p.W = read_tensor("W", h, h);
  p.U = read_tensor("U", h, d);
  p.v = read_tensor("v", h, 1);
  p.B = read_tensor("B", m, h);
  p.c = read_tensor("c", m, 1);
  p.A = read_tensor("A", 1, m);
  p.d = read_tensor("d", 1, 1)(0, 0);
  if (!p.all_finite()) throw ParseError(src, lineno, "non-finite parameter");
  return p;
}

void save_params(const RnnParams& params, const std::filesystem::path& path) { write_file(path, format_params(params)); }

RnnParams load_params(const std::filesystem::path& path) { return parse_params(read_file(path), path.string()); }

std::string history_json(const std::vector<EpochRecord>& history) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : history)
    arr.push_back({{"epoch", r.epoch},
                   {"train_loss", r.train_loss},
                   {"val_accuracy", r.val_accuracy},
                   {"clipped_steps", r.clipped_steps}});
  return arr.dump(2) + "\n";
}

}  // namespace rgi
