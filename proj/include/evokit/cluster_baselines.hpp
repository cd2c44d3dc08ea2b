#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "evokit/clustering_core.hpp"
#include "evokit/matrix.hpp"
#include "evokit/stochastics.hpp"

namespace evokit::baselines {

using clustering::Clustering;
using clustering::Dataset;
using stochastics::RngStream;

enum class KmInit { random, plusplus };

struct KmConfig {
  std::size_t k = 2;
  std::size_t max_iters = 300;
  std::uint64_t seed = 0;
  KmInit init = KmInit::plusplus;
};

/// D^2-weighted sequential seeding; every seed is a data point. When
/// `first` is given it replaces the uniform draw of the first seed.
Matrix kmeans_pp_seed(const Dataset& data, std::size_t k, RngStream& rng,
                      std::optional<std::size_t> first = std::nullopt);

/// k distinct data points drawn uniformly.
Matrix random_seed(const Dataset& data, std::size_t k, RngStream& rng);

/// Lloyd iterations from the given centroids until the assignment stops
/// changing or max_iters. An emptied cluster is reseeded at the point
/// farthest from its current centroid. `sse_trace`, when non-null, receives
/// the SSE after every assignment step.
Clustering lloyd(const Dataset& data, Matrix centroids, std::size_t max_iters,
                 std::vector<double>* sse_trace = nullptr);

/// Throws ErrorKind::parameter when k is 0 or exceeds N.
Clustering kmeans(const Dataset& data, const KmConfig& config);

}  // namespace evokit::baselines
