#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evokit/cluster_baselines.hpp"
#include "evokit/cluster_metrics.hpp"
#include "evokit/eca_star.hpp"
#include "evokit/fca.hpp"
#include "evokit/optimizers.hpp"
#include "evokit/reducer.hpp"
#include "evokit/stats.hpp"

namespace evokit::experiments {

using nlohmann::json;

/// Runs body(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// Rethrows the first exception after all workers have joined.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Benchmark optimisation

struct BenchCase {
  std::string function_id;
  std::size_t dim = 2;
  optimizers::SearchRange range = optimizers::SearchRange::default_space;
};

/// Configurations of the two sweeps: every function at each dimension with
/// the catalog space (fixed-2 functions stay at 2), and every function at
/// D = 2 under R1, R2, R3.
std::vector<BenchCase> dimension_sweep(const std::vector<std::size_t>& dims = {10, 30, 60});
std::vector<BenchCase> range_sweep();

struct BenchSuiteConfig {
  std::vector<optimizers::Algorithm> algorithms;
  std::vector<BenchCase> cases;
  optimizers::OptimizerConfig optimizer;
  /// Metric of the Mean/S.D./Best/Worst columns.
  stats::Metric metric = stats::Metric::iterations;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct BenchRecord {
  BenchCase bench;
  optimizers::Algorithm algorithm = optimizers::Algorithm::bsa;
  std::vector<optimizers::RunResult> runs;
  stats::SummaryStats summary;
};

struct BenchReport {
  BenchSuiteConfig config;
  std::vector<BenchRecord> records;
};

/// Run r of every (case, algorithm) uses seed config.seed + r, so algorithms
/// are compared on paired seeds.
BenchReport run_bench_suite(const BenchSuiteConfig& config);

struct WilcoxonRow {
  BenchCase bench;
  stats::WilcoxonResult result;
};

/// Paired per-case comparison of two algorithms. With the iterations metric
/// a failed run counts as max_iterations + 1.
std::vector<WilcoxonRow> compare(const BenchReport& report, optimizers::Algorithm a, optimizers::Algorithm b,
                                 stats::Metric metric, double alpha);

struct RatioRow {
  std::string configuration;  // "D=10", "R1", ...
  stats::SuccessRatio ratio;
};

/// Functions with at least one successful run, per algorithm and per
/// configuration (dimension or range).
std::vector<RatioRow> success_ratios(const BenchReport& report);

std::string configuration_label(const BenchCase& c);

std::string bench_stats_csv(const BenchReport& report, std::optional<int> digits = std::nullopt);
std::string wilcoxon_csv(const std::vector<WilcoxonRow>& rows, std::optional<int> digits = std::nullopt);
std::string ratios_csv(const std::vector<RatioRow>& rows);

/// Machine JSON: resolved config plus every run, without wall times.
json to_json(const BenchReport& report);
BenchReport bench_report_from_json(const json& j);

// ---------------------------------------------------------------------------
// Clustering

enum class ClusterAlgorithm { eca_star, kmeans, kmeans_pp };
std::string_view to_string(ClusterAlgorithm a);
ClusterAlgorithm parse_cluster_algorithm(std::string_view name);

struct NamedDataset {
  std::string name;
  clustering::Dataset data;
};

struct ClusterSuiteConfig {
  std::vector<NamedDataset> datasets;
  std::vector<ClusterAlgorithm> algorithms;
  eca::EcaParams eca;
  /// K for the K-means baselines; defaults to the ground-truth cluster count.
  std::optional<std::size_t> k;
  std::size_t runs = 30;
  std::uint64_t seed = 0;
  double sse_opt = metrics::kDefaultSseOpt;
  std::size_t threads = 0;
};

struct ClusterRun {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  metrics::QualityReport quality;
};

struct ClusterRecord {
  std::string dataset;
  ClusterAlgorithm algorithm = ClusterAlgorithm::eca_star;
  std::vector<ClusterRun> runs;
  metrics::QualityReport mean;  // run average; external fields absent without ground truth
};

struct ClusterReport {
  ClusterSuiteConfig config;
  std::vector<ClusterRecord> records;
};

/// One clustering run of `algorithm` with `seed`.
clustering::Clustering cluster_once(const clustering::Dataset& data, ClusterAlgorithm algorithm,
                                    const ClusterSuiteConfig& config, std::uint64_t seed);

ClusterReport run_cluster_suite(const ClusterSuiteConfig& config);

std::string cluster_csv(const ClusterReport& report, std::optional<int> digits = std::nullopt);
json to_json(const ClusterReport& report);

// ---------------------------------------------------------------------------
// Formal context reduction

struct FcaSuiteConfig {
  std::string context_name;
  fca::FormalContext context;
  reducer::Taxonomy taxonomy;
  reducer::ReduceParams params;
  std::uint64_t seed = 0;
};

struct FcaReport {
  FcaSuiteConfig config;
  reducer::ReduceResult result;

  /// (original - reduced) / original concept count.
  double concept_reduction() const;
};

FcaReport run_fca_suite(const FcaSuiteConfig& config);

json to_json(const FcaReport& report);
json lattice_json(const fca::FormalContext& ctx, const fca::ConceptLattice& lattice);
json to_json(const fca::LatticeInvariants& inv);

}  // namespace evokit::experiments
