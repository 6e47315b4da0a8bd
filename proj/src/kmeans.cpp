#include "rgi/kmeans.hpp"

#include <limits>
#include <string>
#include <unordered_map>

#include "rgi/error.hpp"
#include "rgi/rng.hpp"

namespace rgi {
namespace {

struct Unique {
  Eigen::MatrixXd points;            // H x U
  std::vector<double> weights;       // multiplicity
  std::vector<int> index_of_point;   // original column -> unique column
};

Unique deduplicate(const Eigen::MatrixXd& points) {
  Unique u;
  const auto h = points.rows();
  std::unordered_map<std::string, int> seen;
  std::vector<Eigen::Index> firsts;
  u.index_of_point.resize(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    std::string key(reinterpret_cast<const char*>(points.col(j).data()), static_cast<std::size_t>(h) * sizeof(double));
    auto [it, inserted] = seen.emplace(std::move(key), static_cast<int>(firsts.size()));
    if (inserted) {
      firsts.push_back(j);
      u.weights.push_back(0.0);
    }
    u.weights[static_cast<std::size_t>(it->second)] += 1.0;
    u.index_of_point[static_cast<std::size_t>(j)] = it->second;
  }
  u.points.resize(h, static_cast<Eigen::Index>(firsts.size()));
  for (std::size_t i = 0; i < firsts.size(); ++i) u.points.col(static_cast<Eigen::Index>(i)) = points.col(firsts[i]);
  return u;
}

// Draws an index with probability proportional to mass[i].
std::size_t draw(const std::vector<double>& mass, Rng& rng) {
  double total = 0;
  for (double m : mass) total += m;
  double r = rng.uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] <= 0) continue;
    last_positive = i;
    if (r < mass[i]) return i;
    r -= mass[i];
  }
  return last_positive;
}

}  // namespace

std::size_t distinct_points(const Eigen::MatrixXd& points) { return deduplicate(points).weights.size(); }

int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::Ref<const Eigen::VectorXd>& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
    const double d = (centroids.col(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

Clustering kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw ExtractionError("kmeans: K must be >= 1");
  const Unique u = deduplicate(points);
  const auto n = static_cast<std::size_t>(u.points.cols());
  if (static_cast<std::size_t>(k) > n)
    throw ExtractionError("kmeans: K=" + std::to_string(k) + " exceeds the " + std::to_string(n) + " distinct points");
  Rng rng(seed);

  // k-means++ seeding over distinct points, weighted by multiplicity.
  Eigen::MatrixXd centroids(u.points.rows(), k);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<double> mass(n);
  std::size_t pick = draw(u.weights, rng);
  for (int c = 0; c < k; ++c) {
    centroids.col(c) = u.points.col(static_cast<Eigen::Index>(pick));
    if (c + 1 == k) break;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (u.points.col(static_cast<Eigen::Index>(i)) - centroids.col(c)).squaredNorm());
      mass[i] = d2[i] * u.weights[i];
    }
    pick = draw(mass, rng);
  }

  Clustering out;
  out.k = k;
  std::vector<int> assign(n, -1);
  std::vector<double> dist(n, 0.0);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto col = u.points.col(static_cast<Eigen::Index>(i));
      const int best = nearest_centroid(centroids, col);
      dist[i] = (centroids.col(best) - col).squaredNorm();
      inertia += dist[i] * u.weights[i];
      changed = changed || best != assign[i];
      assign[i] = best;
    }
    out.inertia_history.push_back(inertia);
    out.inertia = inertia;
    out.iterations = iter + 1;
    if (!changed || iter + 1 == options.max_iterations) {
      out.converged = !changed;
      break;
    }
    // Update step.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(u.points.rows(), k);
    std::vector<double> count(static_cast<std::size_t>(k), 0.0), cost(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.col(assign[i]) += u.weights[i] * u.points.col(static_cast<Eigen::Index>(i));
      count[static_cast<std::size_t>(assign[i])] += u.weights[i];
      cost[static_cast<std::size_t>(assign[i])] += u.weights[i] * dist[i];
    }
    for (int c = 0; c < k; ++c)
      if (count[static_cast<std::size_t>(c)] > 0) centroids.col(c) = sums.col(c) / count[static_cast<std::size_t>(c)];
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0) continue;
      // Split the costliest cluster: its farthest point seeds cluster c.
      const auto worst = static_cast<int>(std::max_element(cost.begin(), cost.end()) - cost.begin());
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i)
        if (assign[i] == worst && (far == n || dist[i] > dist[far])) far = i;
      if (far == n) break;
      centroids.col(c) = u.points.col(static_cast<Eigen::Index>(far));
      assign[far] = c;
      cost[static_cast<std::size_t>(worst)] -= u.weights[far] * dist[far];
      count[static_cast<std::size_t>(c)] = u.weights[far];
      dist[far] = 0;
    }
  }

  out.centroids = centroids;
  out.assignment.resize(static_cast<std::size_t>(points.cols()));
  for (std::size_t j = 0; j < out.assignment.size(); ++j)
    out.assignment[j] = assign[static_cast<std::size_t>(u.index_of_point[j])];
  return out;
}

Clustering kmeans_best_of(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts,
                          const KMeansOptions& options) {
  Clustering best;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Clustering c = kmeans(points, k, derive_seed(seed, "kmeans/" + std::to_string(k) + "/" + std::to_string(r)), options);
    if (r == 0 || c.inertia < best.inertia) best = std::move(c);
  }
  return best;
}

}  // namespace rgi
