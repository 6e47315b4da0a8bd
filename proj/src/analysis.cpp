#include "rgi/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <set>

namespace rgi {

using nlohmann::ordered_json;

namespace {

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

ordered_json word_json(const Word& w, const Alphabet& alphabet) { return alphabet.format(w); }

}  // namespace

// ---------------------------------------------------------------- cycles

CycleReport detect_cycles(std::span<const StateTrace> traces, double epsilon) {
  if (!(epsilon >= 0)) throw Error("cycle epsilon must be >= 0");
  CycleReport rep;
  rep.epsilon = epsilon;
  rep.strings = traces.size();
  const double eps2 = epsilon * epsilon;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& st = traces[i].states;
    rep.states += st.size();
    StringCycles sc{i, {}};
    for (std::size_t a = 0; a < st.size(); ++a) {
      for (std::size_t b = a + 1; b < st.size(); ++b) {
        const double d2 = (st[a] - st[b]).squaredNorm();
        if (d2 > eps2) continue;
        const double d = std::sqrt(d2);
        if (d > epsilon) continue;
        const bool exact = st[a] == st[b];
        sc.pairs.push_back({a, b, d, exact});
        if (exact)
          ++rep.exact_repeats;
        else
          ++rep.epsilon_repeats;
      }
    }
    if (!sc.pairs.empty()) {
      ++rep.strings_with_repeats;
      rep.per_string.push_back(std::move(sc));
    }
  }
  return rep;
}

ordered_json cycle_report_json(const CycleReport& r, std::size_t max_listed) {
  ordered_json j;
  j["epsilon"] = r.epsilon;
  j["strings"] = r.strings;
  j["states"] = r.states;
  j["strings_with_repeats"] = r.strings_with_repeats;
  j["exact_repeats"] = r.exact_repeats;
  j["epsilon_repeats"] = r.epsilon_repeats;
  j["listed"] = std::min(max_listed, r.per_string.size());
  auto& list = j["per_string"] = ordered_json::array();
  for (std::size_t k = 0; k < r.per_string.size() && k < max_listed; ++k) {
    ordered_json e;
    e["string_index"] = r.per_string[k].string_index;
    auto& ps = e["pairs"] = ordered_json::array();
    for (const auto& p : r.per_string[k].pairs)
      ps.push_back({{"t1", p.t1}, {"t2", p.t2}, {"distance", p.distance}, {"exact", p.exact}});
    list.push_back(std::move(e));
  }
  return j;
}

// ---------------------------------------------------------------- PCA

Eigen::VectorXd Pca::project(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return components.transpose() * (x - mean);
}

Pca pca_project(const Eigen::MatrixXd& points, int out_dims) {
  const Eigen::Index h = points.rows(), n = points.cols();
  if (n < 2) throw Error("PCA needs at least 2 points");
  if (out_dims < 1 || out_dims > h) throw Error("PCA output dimension must be in [1, H]");
  Pca p;
  p.mean = points.rowwise().mean();
  const Eigen::MatrixXd centered = points.colwise() - p.mean;
  const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw Error("PCA eigendecomposition failed");

  // eigen returns ascending order
  const Eigen::VectorXd all = es.eigenvalues().reverse().cwiseMax(0.0);
  const double total = all.sum();
  p.components.resize(h, out_dims);
  p.eigenvalues.resize(out_dims);
  for (int k = 0; k < out_dims; ++k) {
    Eigen::VectorXd v = es.eigenvectors().col(h - 1 - k);
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    p.components.col(k) = v;
    p.eigenvalues(k) = all(k);
  }
  p.degenerate = total <= 0.0 || (centered.array() == 0.0).all();
  if (p.degenerate) {
    p.ratios = Eigen::VectorXd::Zero(out_dims);
    p.projection = Eigen::MatrixXd::Zero(out_dims, n);
    p.eigenvalues.setZero();
    return p;
  }
  p.ratios = p.eigenvalues / total;
  p.projection = p.components.transpose() * centered;
  return p;
}

std::string pca_csv(const Pca& pca, const StateCollection& states, const Clustering& cl, const RnnParams& params) {
  if (cl.assignment.size() != states.size()) throw ExtractionError("clustering does not match the state collection");
  std::string out = "x,y,cluster_id,is_final,network_decision\n";
  for (std::size_t j = 0; j < states.size(); ++j) {
    const auto& pv = states.provenance[j];
    const bool is_final = pv.position == states.strings[pv.string_index].size();
    const bool decision = predict_from_state(params, states.points.col(static_cast<Eigen::Index>(j))) >= 0.5;
    const double x = pca.projection(0, static_cast<Eigen::Index>(j));
    const double y = pca.projection.rows() > 1 ? pca.projection(1, static_cast<Eigen::Index>(j)) : 0.0;
    out += fmt("%.9g", x) + "," + fmt("%.9g", y) + "," + std::to_string(cl.assignment[j]) + "," +
           (is_final ? "1" : "0") + "," + (decision ? "1" : "0") + "\n";
  }
  return out;
}

std::string pca_svg(const Pca& pca, const StateCollection& states, const Clustering& cl, const ExtractedDfa& ex,
                    const RnnParams& params) {
  if (cl.assignment.size() != states.size() || pca.projection.cols() != static_cast<Eigen::Index>(states.size()))
    throw ExtractionError("projection/clustering do not match the state collection");
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double W = 640, H = 480, m = 40;
  const Eigen::Index n = pca.projection.cols();
  auto coord = [&](Eigen::Index j, int axis) {
    return axis < pca.projection.rows() ? pca.projection(axis, j) : 0.0;
  };
  const Eigen::VectorXd s0 = pca.project(Eigen::VectorXd::Zero(params.hidden()));
  const double s0x = s0(0), s0y = s0.size() > 1 ? s0(1) : 0.0;
  double x0 = s0x, x1 = s0x, y0 = s0y, y1 = s0y;
  for (Eigen::Index j = 0; j < n; ++j) {
    x0 = std::min(x0, coord(j, 0)), x1 = std::max(x1, coord(j, 0));
    y0 = std::min(y0, coord(j, 1)), y1 = std::max(y1, coord(j, 1));
  }
  if (x1 - x0 < 1e-12) x0 -= 1, x1 += 1;
  if (y1 - y0 < 1e-12) y0 -= 1, y1 += 1;
  auto sx = [&](double x) { return m + (x - x0) / (x1 - x0) * (W - 2 * m); };
  auto sy = [&](double y) { return H - m - (y - y0) / (y1 - y0) * (H - 2 * m); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"10\" y=\"20\" font-size=\"12\" font-family=\"sans-serif\">PCA of hidden states (" +
         fmt("%.1f", 100 * (pca.ratios.size() ? pca.ratios(0) : 0.0)) + "% / " +
         fmt("%.1f", 100 * (pca.ratios.size() > 1 ? pca.ratios(1) : 0.0)) + "% variance), K=" +
         std::to_string(cl.k) + "</text>\n";
  // identical points are drawn once
  std::set<std::tuple<long long, long long, int>> drawn;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double px = sx(coord(j, 0)), py = sy(coord(j, 1));
    const int c = cl.assignment[static_cast<std::size_t>(j)];
    if (!drawn.insert({std::llround(px * 10), std::llround(py * 10), c}).second) continue;
    const bool acc = ex.dfa.accepting(ExtractedDfa::state_of_cluster(c));
    out += "<circle cx=\"" + fmt("%.1f", px) + "\" cy=\"" + fmt("%.1f", py) + "\" r=\"3\" fill=\"" +
           palette[c % 10] + "\"" + (acc ? " stroke=\"black\" stroke-width=\"1.2\"" : "") + "/>\n";
  }
  const double qx = sx(s0x), qy = sy(s0y);
  out += "<path d=\"M" + fmt("%.1f", qx - 6) + " " + fmt("%.1f", qy - 6) + " L" + fmt("%.1f", qx + 6) + " " +
         fmt("%.1f", qy + 6) + " M" + fmt("%.1f", qx - 6) + " " + fmt("%.1f", qy + 6) + " L" + fmt("%.1f", qx + 6) +
         " " + fmt("%.1f", qy - 6) + "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  out += "<text x=\"" + fmt("%.1f", qx + 8) + "\" y=\"" + fmt("%.1f", qy - 8) +
         "\" font-size=\"11\" font-family=\"sans-serif\">s0</text>\n";
  for (int c = 0; c < cl.k; ++c) {
    const double ly = 40 + 16 * c;
    const bool acc = ex.dfa.accepting(ExtractedDfa::state_of_cluster(c));
    out += "<circle cx=\"580\" cy=\"" + fmt("%.0f", ly) + "\" r=\"4\" fill=\"" + palette[c % 10] + "\"" +
           (acc ? " stroke=\"black\" stroke-width=\"1.2\"" : "") + "/>\n";
    out += "<text x=\"590\" y=\"" + fmt("%.0f", ly + 4) + "\" font-size=\"11\" font-family=\"sans-serif\">" +
           std::to_string(c) + (acc ? " (acc)" : "") + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

ordered_json cluster_decision_report(const StateCollection& states, const Clustering& cl) {
  if (cl.assignment.size() != states.size()) throw ExtractionError("clustering does not match the state collection");
  std::vector<std::size_t> acc(static_cast<std::size_t>(cl.k)), rej(static_cast<std::size_t>(cl.k));
  for (std::size_t i = 0; i < states.strings.size(); ++i) {
    const auto len = states.strings[i].size();
    if (len == 0) continue;
    const int c = cl.assignment[states.point_index(i, len)];
    (states.network_accepts(i) ? acc : rej)[static_cast<std::size_t>(c)]++;
  }
  ordered_json j;
  auto& arr = j["clusters"] = ordered_json::array();
  bool all_pure = true;
  for (int c = 0; c < cl.k; ++c) {
    const auto a = acc[static_cast<std::size_t>(c)], r = rej[static_cast<std::size_t>(c)];
    const bool pure = a == 0 || r == 0;
    all_pure = all_pure && pure;
    ordered_json e;
    e["cluster"] = c;
    e["final_accepts"] = a;
    e["final_rejects"] = r;
    e["majority"] = a + r == 0 ? "none" : (a > r ? "accept" : "reject");
    e["purity"] = a + r == 0 ? 1.0 : static_cast<double>(std::max(a, r)) / static_cast<double>(a + r);
    arr.push_back(std::move(e));
  }
  j["single_decision_per_cluster"] = all_pure;
  return j;
}

// ---------------------------------------------------------------- errors

namespace {

// Accepted words of `d` up to max_len in length-then-lex order; stops after
// `limit` words.
std::vector<Word> accepted_words(const Dfa& d, int max_len, std::size_t limit) {
  const int n = d.size();
  const auto k = static_cast<Symbol>(d.alphabet().size());
  // shortest distance to an accepting state
  std::vector<int> dist(static_cast<std::size_t>(n), std::numeric_limits<int>::max());
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(n));
  std::deque<int> queue;
  for (int q = 0; q < n; ++q) {
    for (Symbol a = 0; a < k; ++a) rev[static_cast<std::size_t>(d.next(q, a))].push_back(q);
    if (d.accepting(q)) dist[static_cast<std::size_t>(q)] = 0, queue.push_back(q);
  }
  while (!queue.empty()) {
    const int q = queue.front();
    queue.pop_front();
    for (int p : rev[static_cast<std::size_t>(q)])
      if (dist[static_cast<std::size_t>(p)] == std::numeric_limits<int>::max()) {
        dist[static_cast<std::size_t>(p)] = dist[static_cast<std::size_t>(q)] + 1;
        queue.push_back(p);
      }
  }

  std::vector<Word> out;
  Word cur;
  // depth-first, lex order, only into states that can still finish in time
  auto rec = [&](auto&& self, int q, int remaining) -> void {
    if (out.size() >= limit) return;
    if (remaining == 0) {
      if (d.accepting(q)) out.push_back(cur);
      return;
    }
    for (Symbol a = 0; a < k && out.size() < limit; ++a) {
      const int r = d.next(q, a);
      if (dist[static_cast<std::size_t>(r)] > remaining - 1) continue;
      cur.push_back(a);
      self(self, r, remaining - 1);
      cur.pop_back();
    }
  };
  for (int len = 0; len <= max_len && out.size() < limit; ++len)
    if (dist[static_cast<std::size_t>(d.start())] <= len) rec(rec, d.start(), len);
  return out;
}

}  // namespace

ErrorReport mine_errors(const Dfa& extracted, const Dfa& truth, std::span<const LabeledString> test, int max_length,
                        std::size_t max_per_class) {
  if (max_length < 0) throw Error("error enumeration length must be >= 0");
  const Dfa a = complete(extracted);
  const Dfa b = complete(reorder_alphabet(truth, extracted.alphabet()));
  ErrorReport rep;
  rep.max_length = max_length;
  rep.test_total = test.size();
  for (const auto& ls : test)
    if (accepts(a, ls.tokens) == (ls.label == 1)) ++rep.test_correct;
  rep.test_accuracy = test.empty() ? 1.0 : static_cast<double>(rep.test_correct) / static_cast<double>(test.size());
  rep.difference = symmetric_difference(a, b);

  auto mine = [&](const std::function<bool(bool, bool)>& op, std::vector<Word>& out, bool& truncated) {
    out = accepted_words(product(a, b, op), max_length, max_per_class + 1);
    truncated = out.size() > max_per_class;
    if (truncated) out.pop_back();
  };
  mine([](bool x, bool y) { return x && !y; }, rep.false_accepts, rep.false_accepts_truncated);
  mine([](bool x, bool y) { return !x && y; }, rep.false_rejects, rep.false_rejects_truncated);
  return rep;
}

ordered_json error_report_json(const ErrorReport& r, const Alphabet& alphabet) {
  ordered_json j;
  j["test_total"] = r.test_total;
  j["test_correct"] = r.test_correct;
  j["test_accuracy"] = r.test_accuracy;
  j["max_length"] = r.max_length;
  j["difference_states"] = minimize(r.difference).size();
  j["difference_empty"] = r.difference.accept_states().empty();
  j["false_accepts_truncated"] = r.false_accepts_truncated;
  j["false_rejects_truncated"] = r.false_rejects_truncated;
  auto& fa = j["false_accepts"] = ordered_json::array();
  for (const auto& w : r.false_accepts) fa.push_back(word_json(w, alphabet));
  auto& fr = j["false_rejects"] = ordered_json::array();
  for (const auto& w : r.false_rejects) fr.push_back(word_json(w, alphabet));
  return j;
}

// ---------------------------------------------------------------- pumping

Augmentation pump_errors(const Dfa& extracted, const Dfa& truth, const Word& base, std::size_t count) {
  const Dfa a = complete(extracted);
  const Dfa b = complete(reorder_alphabet(truth, extracted.alphabet()));
  if (accepts(a, base) == accepts(b, base)) throw Error("base string is not misclassified by the extracted DFA");

  std::vector<int> run{a.start()};
  for (Symbol s : base) run.push_back(a.next(run.back(), s));
  Augmentation aug;
  aug.base = base;
  bool found = false;
  for (std::size_t i = 0; i < run.size() && !found; ++i)
    for (std::size_t j = i + 1; j < run.size(); ++j)
      if (run[i] == run[j]) {
        aug.t1 = i, aug.t2 = j, found = true;
        break;
      }
  if (!found)
    throw NotPumpableError("string '" + extracted.alphabet().format(base) + "' visits no state twice; not pumpable");
  aug.prefix.assign(base.begin(), base.begin() + static_cast<std::ptrdiff_t>(aug.t1));
  aug.infix.assign(base.begin() + static_cast<std::ptrdiff_t>(aug.t1), base.begin() + static_cast<std::ptrdiff_t>(aug.t2));
  aug.suffix.assign(base.begin() + static_cast<std::ptrdiff_t>(aug.t2), base.end());

  const std::size_t attempts = 4 * count + 16;
  for (std::size_t n = 0, tried = 0; aug.variants.size() < count && tried < attempts; ++n) {
    if (n == 1) continue;
    ++tried;
    Word v = aug.prefix;
    for (std::size_t r = 0; r < n; ++r) v.insert(v.end(), aug.infix.begin(), aug.infix.end());
    v.insert(v.end(), aug.suffix.begin(), aug.suffix.end());
    const bool truth_says = accepts(b, v);
    if (accepts(a, v) == truth_says) continue;
    aug.variants.push_back({std::move(v), truth_says ? 1 : 0,
                            truth_says ? Origin::Positive : Origin::RandomNegative});
  }
  return aug;
}

std::vector<Augmentation> augment(const Dfa& extracted, const Dfa& truth, const ErrorReport& errors,
                                  std::size_t per_base, std::size_t max_bases) {
  std::vector<Word> bases = errors.false_accepts;
  bases.insert(bases.end(), errors.false_rejects.begin(), errors.false_rejects.end());
  std::stable_sort(bases.begin(), bases.end(), [](const Word& x, const Word& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  std::vector<Augmentation> out;
  std::set<Word> seen(bases.begin(), bases.end());
  for (const auto& w : bases) {
    if (out.size() >= max_bases) break;
    Augmentation aug;
    try {
      aug = pump_errors(extracted, truth, w, per_base);
    } catch (const NotPumpableError&) {
      continue;
    }
    std::erase_if(aug.variants, [&](const LabeledString& ls) { return !seen.insert(ls.tokens).second; });
    out.push_back(std::move(aug));
  }
  return out;
}

}  // namespace rgi
