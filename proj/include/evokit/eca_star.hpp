#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "evokit/clustering_core.hpp"
#include "evokit/matrix.hpp"
#include "evokit/stochastics.hpp"

namespace evokit::eca {

using clustering::Clustering;
using clustering::Dataset;
using stochastics::RngStream;

enum class CrossoverType { uniform };

struct EcaParams {
  std::size_t social_ranks = 2;
  double density_threshold = 0.01;
  double levy_alpha = 1.001;
  /// Multiplier applied to every Levy draw before it scales the
  /// learning vector.
  double levy_scale = 0.01;
  std::size_t max_cycles = 50;
  CrossoverType crossover = CrossoverType::uniform;
  std::uint64_t seed = 0;
  /// Absolute tolerance of the "nothing changed" stopping test.
  double stop_tolerance = 1e-9;

  /// Throws ErrorKind::parameter.
  void validate() const;
};

/// Rank-digit initialisation never uses more than this many initial clusters;
/// see `init_assign`.
inline constexpr std::size_t kMaxInitialClusters = 4096;

struct InitialAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> assignment;
  /// Dimensions whose rank digits form the cluster id (all of them unless
  /// S^D exceeds kMaxInitialClusters).
  std::vector<std::size_t> rank_dims;
};

/// Each gene gets class min(floor(percentile_rank * S / 100), S - 1); the
/// cluster id is the mixed-radix number formed by those digits (first
/// dimension least significant), so K = S^D. When S^D > kMaxInitialClusters
/// only the floor(log_S(kMaxInitialClusters)) highest-variance dimensions
/// contribute digits. Throws ErrorKind::parameter when S < 2 or when not even
/// one dimension fits.
InitialAssignment init_assign(const Dataset& data, std::size_t social_ranks);

/// Working state of one ECA* run. Row i of every matrix belongs to live
/// cluster i; `clustering.centroids` holds C and
/// `clustering.historical_centroids` holds oldC.
struct EcaState {
  Clustering clustering;
  std::size_t k = 0;
  std::size_t k_empty = 0;  // removed by the last Clustering-I
  std::size_t k_dth = 0;    // merged away as low density by the last Clustering-I
  std::vector<double> density;
  Matrix selected;  // newC
  Matrix learning;  // HI
  Matrix mutant;
  Matrix mut_over;  // MO
  std::vector<double> data_low;
  std::vector<double> data_up;
};

EcaState make_state(const Dataset& data, const InitialAssignment& init);

/// Clustering-I: drops empty clusters, folds clusters with density below the
/// threshold into the nearest surviving cluster, sets C to the per-dimension
/// mean of (Q1, Q2, Q3) of the members, draws oldC ~ U(Q1, Q3) per dimension,
/// evaluates intra/inter for the partitions induced by C and by oldC and
/// selects newC. Throws ErrorKind::degenerate when no cluster has members.
EcaState clustering_one(EcaState state, const Dataset& data, double density_threshold,
                        RngStream& rng);

/// Mutation, uniform crossover and the mut-over choice, followed by boundary
/// control against the data's bounding box. Returns MO (also stored).
const Matrix& mut_over(EcaState& state, const EcaParams& params, RngStream& rng);

/// Clustering-II: one scan over neighbouring cluster pairs (i, i + 1),
/// merging when min(Dmin - R_i, Dmin - R_j) <= 0 where R is intra_cluster of
/// the members.
EcaState clustering_two(EcaState state, const Dataset& data);

struct EcaResult {
  /// Final partition; centroids are the quartile-mean centroids of the final
  /// members.
  Clustering clustering;
  Matrix mut_over;
  std::size_t cycles = 0;
  bool converged = false;
  std::vector<std::size_t> k_trace;  // live clusters after each cycle
};

/// Initialisation, then up to max_cycles of Clustering-I, mut-over,
/// Clustering-II and reassignment of every point to its nearest MO centroid.
/// Stops early once inter and every intra are unchanged between consecutive
/// cycles.
EcaResult run_eca_star(const Dataset& data, const EcaParams& params);

}  // namespace evokit::eca
