#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "evokit/clustering_core.hpp"
#include "evokit/matrix.hpp"

namespace evokit::metrics {

using clustering::Clustering;
using clustering::Dataset;

inline constexpr double kDefaultSseOpt = 0.001;

/// Sum of squared Euclidean distances from each point to its own centroid.
double sse(const Dataset& data, const Clustering& clustering);
double sse(const Matrix& points, std::span<const std::size_t> assignment, const Matrix& centroids);

/// sse / (N * D). Throws ErrorKind::parameter when N * D is 0.
double nmse(double sse, std::size_t n, std::size_t d);

/// (sse - sse_opt) / sse_opt. Throws ErrorKind::parameter unless sse_opt > 0.
double eps_ratio(double sse, double sse_opt = kDefaultSseOpt);

/// Nearest-centroid mapping in both directions; each direction counts the
/// targets that receive no mapping and CI is the larger count.
std::size_t centroid_index(const Matrix& solution, const Matrix& truth);

/// Clusters are paired greedily by ascending centroid distance (one to one);
/// the result is the number of points shared by paired clusters over N.
double csi(const Clustering& solution, const Clustering& truth);

/// Mutual information over sqrt(H_a * H_b), natural logs. When either side
/// has a single cluster the value is 1 if both do, else 0.
double nmi(std::span<const std::size_t> a, std::span<const std::size_t> b);

struct QualityReport {
  double sse = 0.0;
  double nmse = 0.0;
  double eps_ratio = 0.0;
  std::optional<double> ci;
  std::optional<double> csi;
  std::optional<double> nmi;
};

/// Builds the ground-truth partition by sending each point to its nearest
/// ground-truth centroid, unless explicit labels are present.
Clustering ground_truth_clustering(const Dataset& data);

/// Internal measures always; external ones only when the dataset carries
/// ground-truth centroids.
QualityReport evaluate(const Dataset& data, const Clustering& clustering, double sse_opt = kDefaultSseOpt);

}  // namespace evokit::metrics
