#pragma once
// Central finite-difference oracle for the classifier's mean batch loss.
// Uses only forward() and loss(), never backward().

#include <algorithm>
#include <cmath>
#include <vector>

#include "rgi/rnn.hpp"

namespace oracle {

inline double batch_loss(const rgi::RnnParams& p, const std::vector<rgi::LabeledString>& batch) {
  std::vector<double> preds;
  std::vector<int> labels;
  for (const auto& ls : batch) {
    preds.push_back(rgi::forward(p, ls.tokens).prediction);
    labels.push_back(ls.label);
  }
  return rgi::loss(preds, labels);
}

// Numerical gradient, flattened in for_each() order.
inline std::vector<double> numeric_gradient(const rgi::RnnParams& params, const std::vector<rgi::LabeledString>& batch,
                                            double h = 1e-5) {
  rgi::RnnParams p = params;
  std::vector<double*> slots;
  p.for_each([&](std::string_view, std::span<double> t) {
    for (double& x : t) slots.push_back(&x);
  });
  std::vector<double> out;
  for (double* x : slots) {
    const double saved = *x;
    *x = saved + h;
    const double up = batch_loss(p, batch);
    *x = saved - h;
    const double down = batch_loss(p, batch);
    *x = saved;
    out.push_back((up - down) / (2 * h));
  }
  return out;
}

inline std::vector<double> flatten(const rgi::RnnParams& p) {
  std::vector<double> out;
  p.for_each([&](std::string_view, std::span<const double> t) { out.insert(out.end(), t.begin(), t.end()); });
  return out;
}

// max |a-n| / max(|a|, |n|, floor). The floor keeps entries that are
// numerically zero on both sides from dominating.
inline double max_relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric,
                                 double floor = 1e-6) {
  double worst = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

}  // namespace oracle
