#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace rgi {

// Points are the columns of an H x N matrix.
struct Clustering {
  int k = 0;
  Eigen::MatrixXd centroids;    // H x K
  std::vector<int> assignment;  // per point, in [0, K)
  double inertia = 0.0;         // sum of squared distances to assigned centroid
  std::vector<double> inertia_history;  // after each assignment pass
  int iterations = 0;
  bool converged = false;
};

struct KMeansOptions {
  int max_iterations = 300;
};

// Number of bitwise-distinct columns.
std::size_t distinct_points(const Eigen::MatrixXd& points);

// k-means++ seeding followed by Lloyd iterations until the assignment is a
// fixed point (or max_iterations). Nearest-centroid ties go to the lowest
// cluster id. A cluster left empty takes over the point farthest from its
// centroid in the cluster with the largest inertia. Identical points are
// processed once with multiplicity weights, so cost scales with the number
// of distinct points. Throws ExtractionError when k exceeds the number of
// distinct points.
Clustering kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

// Lowest-inertia result over `restarts` runs with seeds derived from `seed`.
Clustering kmeans_best_of(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts,
                          const KMeansOptions& options = {});

// Index of the centroid nearest to `x` (lowest id on ties).
int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace rgi
