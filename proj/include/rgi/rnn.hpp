#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgi/alphabet.hpp"
#include "rgi/datagen.hpp"

namespace rgi {

// Elman classifier:
//   s_t = tanh(W s_{t-1} + U x_t + v),  s_0 = 0, x_t one-hot
//   y   = sigmoid(A sigmoid(B s_n + c) + d)
struct RnnParams {
  Alphabet alphabet;
  Eigen::MatrixXd W;     // H x H
  Eigen::MatrixXd U;     // H x D
  Eigen::VectorXd v;     // H
  Eigen::MatrixXd B;     // M x H
  Eigen::VectorXd c;     // M
  Eigen::RowVectorXd A;  // 1 x M
  double d = 0.0;

  int hidden() const noexcept { return static_cast<int>(W.rows()); }
  int head() const noexcept { return static_cast<int>(B.rows()); }
  int input() const noexcept { return static_cast<int>(U.cols()); }

  // Zero tensors of the given shape.
  static RnnParams zeros(const Alphabet& alphabet, int hidden, int head);
  RnnParams zeros_like() const { return zeros(alphabet, hidden(), head()); }

  bool all_finite() const;
  // Visits every tensor as a flat mutable span, in the order W U v B c A d.
  void for_each(const std::function<void(std::string_view name, std::span<double>)>& fn);
  void for_each(const std::function<void(std::string_view name, std::span<const double>)>& fn) const;
  std::size_t parameter_count() const;

  friend bool operator==(const RnnParams& a, const RnnParams& b);
};

struct TrainConfig {
  int epochs = 15;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  int hidden = 10;
  int head = 10;
  std::uint64_t seed = 42;
  double target_accuracy = 0.99;  // early stop once validation accuracy reaches it
  double clip_norm = 5.0;         // global gradient norm; <= 0 disables

  void validate() const;
};

struct StateTrace {
  std::vector<Eigen::VectorXd> states;  // s_0 .. s_n
  Eigen::VectorXd head_hidden;          // sigmoid(B s_n + c)
  double prediction = 0.5;
};

// Glorot-uniform matrices, zero biases.
RnnParams init_params(const Alphabet& alphabet, const TrainConfig& config, Rng& rng);

StateTrace forward(const RnnParams& params, const Word& word);
Eigen::VectorXd step(const RnnParams& params, const Eigen::VectorXd& state, Symbol symbol);
// Classifier output if the sequence ended in `state`.
double predict_from_state(const RnnParams& params, const Eigen::VectorXd& state);
double predict(const RnnParams& params, const Word& word);

inline constexpr double kLossClamp = 1e-12;

// Mean binary cross-entropy, predictions clamped to [1e-12, 1 - 1e-12].
double loss(std::span<const double> predictions, std::span<const int> labels);

struct Gradients {
  RnnParams grad;
  double loss = 0.0;
};

// Exact gradients of the mean batch loss by backpropagation through time.
Gradients backward(const RnnParams& params, std::span<const LabeledString> batch);

struct AdamState {
  RnnParams m;
  RnnParams u;
  long step = 0;
};

AdamState make_adam_state(const RnnParams& params);
void adam_step(RnnParams& params, const RnnParams& grad, AdamState& state, const TrainConfig& config);

// Scales `grad` to global norm max_norm when above it. Returns the norm
// before scaling.
double clip_gradients(RnnParams& grad, double max_norm);

// Fraction of strings where (prediction >= 0.5) equals the label.
double evaluate(const RnnParams& params, std::span<const LabeledString> strings);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_accuracy = 0.0;
  std::size_t clipped_steps = 0;
};

struct TrainResult {
  RnnParams params;  // best validation accuracy seen
  std::vector<EpochRecord> history;
  double initial_train_loss = 0.0;
  int best_epoch = 0;
  double best_val_accuracy = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train(const Dataset& dataset, const TrainConfig& config, const EpochCallback& on_epoch = {});

// Mean loss of the network over a split.
double dataset_loss(const RnnParams& params, std::span<const LabeledString> strings);

// "rnn-params v1 H=<h> D=<d> M=<m> alphabet=<tokens>" then one line per
// tensor: name, rows, cols, row-major values with 17 significant digits.
std::string format_params(const RnnParams& params);
RnnParams parse_params(std::string_view text, std::string_view source = "<params>");
void save_params(const RnnParams& params, const std::filesystem::path& path);
RnnParams load_params(const std::filesystem::path& path);

// JSON array of {epoch, train_loss, val_accuracy, clipped_steps}.
std::string history_json(const std::vector<EpochRecord>& history);

}  // namespace rgi
