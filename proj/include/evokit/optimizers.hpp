#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evokit/benchfns.hpp"
#include "evokit/matrix.hpp"
#include "evokit/stochastics.hpp"

namespace evokit::optimizers {

using stochastics::RngStream;

/// Per-variable search box.
struct Bounds {
  std::vector<double> low;
  std::vector<double> up;

  static Bounds box(std::size_t dim, double low, double up);
  std::size_t dim() const noexcept { return low.size(); }
  bool contains(std::span<const double> x) const;
};

using Objective = std::function<double(std::span<const double>)>;

struct Population {
  Matrix individuals;
  std::vector<double> fitness;
};

enum class Algorithm { bsa, de, pso, abc, ff };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);
inline constexpr std::array<Algorithm, 5> kAllAlgorithms{Algorithm::bsa, Algorithm::de,
                                                         Algorithm::pso, Algorithm::abc,
                                                         Algorithm::ff};

struct OptimizerConfig {
  std::size_t population_size = 30;
  std::size_t max_iterations = 2000;
  std::size_t runs = 30;
  double success_tolerance = 1e-6;
  bool stop_on_success = true;

  double mixrate = 1.0;  // BSA

  double de_f = 0.5;
  double de_cr = 0.9;

  double pso_w = 0.729;
  double pso_c1 = 1.49445;
  double pso_c2 = 1.49445;

  std::size_t abc_limit = 100;

  double ff_beta0 = 1.0;
  double ff_gamma = 1.0;
  double ff_alpha = 0.2;
  double ff_alpha_decay = 0.97;

  /// Throws ErrorKind::parameter on invalid counts or rates.
  void validate() const;
};

enum class SearchRange { default_space, r1, r2, r3 };

std::string_view to_string(SearchRange range);
SearchRange parse_range(std::string_view name);

/// A benchmark function bound to a dimension and a search box.
struct Problem {
  std::string function_id;
  std::size_t dim = 0;
  Objective objective;
  Bounds bounds;
  double target = 0.0;  // global minimum value at `dim`
};

/// R1 = [-5, 5], R2 = [-250, 250], R3 = [-500, 500]; default_space uses the
/// catalog bounds. Throws ErrorKind::shape if `dim` breaks the function's rule.
Problem make_problem(const benchfns::BenchmarkFunction& fn, std::size_t dim, SearchRange range);

struct RunResult {
  std::uint64_t seed = 0;
  double best_value = 0.0;
  std::vector<double> best_point;
  std::optional<std::size_t> iterations_to_success;  // none = "NC"
  bool succeeded = false;
  double wall_time = 0.0;                              // seconds
  std::vector<double> trajectory;                      // best value after each iteration, [0] = init
};

std::vector<double> evaluate_rows(const Objective& objective, const Matrix& individuals);

// ---------------------------------------------------------------------------
// Backtracking search building blocks.

struct BsaPopulations {
  Population current;
  Matrix historical;
};

BsaPopulations bsa_init(const Problem& problem, std::size_t population_size, RngStream& rng);

/// Draws a, b ~ U(0, 1); if a < b the historical population is replaced by the
/// current one. The result's rows are then shuffled.
Matrix bsa_selection1(const Matrix& current, const Matrix& historical, RngStream& rng);

/// Selection-I with the branch fixed by the caller.
Matrix bsa_selection1(const Matrix& current, const Matrix& historical, bool adopt_current,
                      RngStream& rng);

/// current + amplitude * (historical - current), elementwise.
Matrix bsa_mutation(const Matrix& current, const Matrix& historical, double amplitude);

/// Binary N x D map; 1 keeps the current individual's gene, 0 takes the mutant's.
class CrossoverMap {
 public:
  CrossoverMap(std::size_t rows, std::size_t cols, bool fill)
      : rows_(rows), cols_(cols), bits_(rows * cols, fill ? 1 : 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool keeps_current(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool keep) { bits_[r * cols_ + c] = keep ? 1 : 0; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<unsigned char> bits_;
};

/// Two-strategy map: with probability 1/2 each row takes the mutant at
/// ceil(mixrate * rand * D) random positions (at least one), otherwise at
/// exactly one random position.
CrossoverMap bsa_crossover_map(std::size_t rows, std::size_t cols, double mixrate, RngStream& rng);

Matrix bsa_apply_map(const Matrix& current, const Matrix& mutant, const CrossoverMap& map);

Matrix bsa_crossover(const Matrix& current, const Matrix& mutant, double mixrate, RngStream& rng);

/// Regenerates every out-of-bounds coordinate uniformly inside its bounds.
Matrix boundary_control(Matrix trial, const Bounds& bounds, RngStream& rng);

/// Greedy replacement: row i of the result is the trial row when its fitness
/// is strictly lower, otherwise the current row.
Population bsa_selection2(const Population& current, const Matrix& trial,
                          std::span<const double> trial_fitness);

// ---------------------------------------------------------------------------

/// Full optimisation loop for one seeded run. BSA draws its amplitude as
/// 3 * N(0, 1) each iteration.
RunResult run_optimizer(Algorithm algo, const Problem& problem, const OptimizerConfig& config,
                        std::uint64_t seed);

}  // namespace evokit::optimizers
