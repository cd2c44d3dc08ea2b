#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evokit/optimizers.hpp"

namespace evokit::stats {

/// The seven per-(function, algorithm) measures. Location statistics are
/// empty ("NC") when no run succeeded.
struct SummaryStats {
  std::optional<double> mean;
  std::optional<double> sd;
  std::optional<double> best;
  std::optional<double> worst;
  double mean_exec_time = 0.0;
  std::size_t n_success = 0;
  std::size_t n_failure = 0;

  bool not_converged() const noexcept { return !mean.has_value(); }
};

/// Which per-run quantity the location statistics describe.
enum class Metric { iterations, best_value };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view name);

/// Location statistics over successful runs only; SD uses the n-1
/// denominator and is 0 for a single run. Throws ErrorKind::input on an
/// empty list.
SummaryStats summarize(std::span<const optimizers::RunResult> results, Metric metric);

/// Mean / SD / min / max of raw values. Throws ErrorKind::input when empty.
SummaryStats summarize_values(std::span<const double> values);

enum class Winner { a, b, tie };

std::string_view to_string(Winner w);

struct WilcoxonResult {
  double r_plus = 0.0;   // rank sum of positive differences a - b
  double r_minus = 0.0;  // rank sum of negative differences
  double p_value = 1.0;  // two-sided
  std::size_t n_effective = 0;  // nonzero differences
  bool exact = true;
  Winner winner = Winner::tie;
};

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped and tied magnitudes share average ranks. The p-value is exact
/// (full null distribution of R+ given the observed ranks) for up to 25
/// nonzero differences and a tie-corrected normal approximation with
/// continuity correction beyond. The side with the smaller values wins when
/// p < alpha.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha = 0.05);

/// Largest n' handled by the exact path.
inline constexpr std::size_t kExactWilcoxonLimit = 25;

struct SuccessRatio {
  std::string algorithm;
  std::size_t success = 0;  // functions with at least one successful run
  std::size_t failure = 0;
};

/// `table` maps algorithm name to its per-function success counts (one entry
/// per function, each in [0, runs]).
std::vector<SuccessRatio> success_ratio(const std::map<std::string, std::vector<std::size_t>>& table,
                                        std::size_t runs);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace evokit::stats
