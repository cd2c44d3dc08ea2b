#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "evokit/matrix.hpp"

namespace evokit::clustering {

/// N x D points with optional ground truth.
struct Dataset {
  Matrix points;
  std::optional<Matrix> ground_truth_centroids;
  std::optional<std::vector<std::size_t>> labels;

  std::size_t size() const noexcept { return points.rows(); }
  std::size_t dim() const noexcept { return points.cols(); }

  /// Throws ErrorKind::shape / ErrorKind::input when the invariants fail.
  void validate() const;
};

/// A partition plus the centroid bookkeeping shared by the clustering
/// algorithms. `intra`/`old_intra` are per cluster, `inter`/`old_inter` per
/// solution; the historical fields are left empty by algorithms that do not
/// keep history.
struct Clustering {
  std::vector<std::size_t> assignment;
  Matrix centroids;
  Matrix historical_centroids;
  std::vector<double> intra;
  std::vector<double> old_intra;
  double inter = 0.0;
  double old_inter = 0.0;

  std::size_t k() const noexcept { return centroids.rows(); }
};

double euclidean(std::span<const double> x, std::span<const double> y);
double squared_euclidean(std::span<const double> x, std::span<const double> y);

/// Mean distance over ordered pairs of distinct members; 0 for a singleton.
/// Throws ErrorKind::input for an empty cluster.
double intra_cluster(const Matrix& cluster_points);
double intra_cluster(const Matrix& data, std::span<const std::size_t> members);

/// Member-to-foreign-mean distance averaged over both clusters.
double inter_cluster(const Matrix& a_points, const Matrix& b_points);
double inter_cluster(const Matrix& data, std::span<const std::size_t> a,
                     std::span<const std::size_t> b);

/// Closest pair distance between two member sets.
double min_distance(const Matrix& data, std::span<const std::size_t> a,
                    std::span<const std::size_t> b);

/// 100 * (#{v < x} + 0.5 * #{v == x}) / N.
double percentile_rank(std::span<const double> values, double x);

struct Quartiles {
  double q1;
  double q2;
  double q3;
};

/// Linear interpolation between order statistics (R type 7).
Quartiles quartiles(std::span<const double> values);

/// Member index lists per cluster id in [0, k).
std::vector<std::vector<std::size_t>> members_by_cluster(std::span<const std::size_t> assignment,
                                                         std::size_t k);

Matrix gather_rows(const Matrix& data, std::span<const std::size_t> rows);

std::vector<double> mean_of(const Matrix& data, std::span<const std::size_t> rows);

/// Index of the centroid nearest to `x` (first on ties).
std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> x);

std::vector<std::size_t> assign_nearest(const Matrix& data, const Matrix& centroids);

/// Solution-level separation: mean of inter_cluster over all pairs of
/// non-empty clusters, 0 with fewer than two.
double solution_inter(const Matrix& data, const std::vector<std::vector<std::size_t>>& members);

/// Per-dimension minimum and maximum of the data.
std::pair<std::vector<double>, std::vector<double>> data_bounds(const Matrix& data);

}  // namespace evokit::clustering
