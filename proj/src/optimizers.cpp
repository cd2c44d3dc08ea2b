#include "evokit/optimizers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "evokit/errors.hpp"

namespace evokit::optimizers {

using stochastics::permute;
using stochastics::standard_normal;
using stochastics::uniform;

Bounds Bounds::box(std::size_t dim, double low, double up) {
  return Bounds{std::vector<double>(dim, low), std::vector<double>(dim, up)};
}

bool Bounds::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < low[j] || x[j] > up[j]) return false;
  return true;
}

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::bsa: return "bsa";
    case Algorithm::de: return "de";
    case Algorithm::pso: return "pso";
    case Algorithm::abc: return "abc";
    case Algorithm::ff: return "ff";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms)
    if (to_string(a) == name) return a;
  throw Error(ErrorKind::parameter, "unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(SearchRange range) {
  switch (range) {
    case SearchRange::default_space: return "default";
    case SearchRange::r1: return "R1";
    case SearchRange::r2: return "R2";
    case SearchRange::r3: return "R3";
  }
  return "?";
}

SearchRange parse_range(std::string_view name) {
  if (name == "default") return SearchRange::default_space;
  if (name == "R1" || name == "r1") return SearchRange::r1;
  if (name == "R2" || name == "r2") return SearchRange::r2;
  if (name == "R3" || name == "r3") return SearchRange::r3;
  throw Error(ErrorKind::parameter, "unknown search range '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (population_size < 1 || runs < 1)
    throw Error(ErrorKind::parameter, "population size and runs must be at least 1");
  if (!(success_tolerance > 0.0))
    throw Error(ErrorKind::parameter, "success tolerance must be positive");
  if (!(mixrate > 0.0 && mixrate <= 1.0))
    throw Error(ErrorKind::parameter, "mixrate must lie in (0, 1]");
  if (!(de_cr >= 0.0 && de_cr <= 1.0))
    throw Error(ErrorKind::parameter, "DE crossover rate must lie in [0, 1]");
  if (abc_limit < 1) throw Error(ErrorKind::parameter, "ABC limit must be at least 1");
}

Problem make_problem(const benchfns::BenchmarkFunction& fn, std::size_t dim, SearchRange range) {
  if (!fn.accepts_dimension(dim)) {
    std::ostringstream msg;
    msg << fn.name << " does not accept dimension " << dim;
    throw Error(ErrorKind::shape, msg.str());
  }
  double low = fn.low, up = fn.up;
  switch (range) {
    case SearchRange::default_space: break;
    case SearchRange::r1: low = -5.0; up = 5.0; break;
    case SearchRange::r2: low = -250.0; up = 250.0; break;
    case SearchRange::r3: low = -500.0; up = 500.0; break;
  }
  const benchfns::BenchmarkFunction* fp = &fn;
  return Problem{std::string(fn.id), dim,
                 [fp](std::span<const double> x) { return benchfns::evaluate(*fp, x); },
                 Bounds::box(dim, low, up), benchfns::exact_minimum(fn, dim)};
}

std::vector<double> evaluate_rows(const Objective& objective, const Matrix& individuals) {
  std::vector<double> out(individuals.rows());
  for (std::size_t i = 0; i < individuals.rows(); ++i) out[i] = objective(individuals.row(i));
  return out;
}

namespace {

Matrix random_population(const Bounds& bounds, std::size_t n, RngStream& rng) {
  Matrix m(n, bounds.dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < bounds.dim(); ++j) m(i, j) = uniform(rng, bounds.low[j], bounds.up[j]);
  return m;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) throw Error(ErrorKind::shape, std::string(what) + ": shape mismatch");
}

void clamp_into(std::span<double> x, const Bounds& bounds) {
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], bounds.low[j], bounds.up[j]);
}

/// Tracks the best-so-far solution, the trajectory and the first iteration
/// at which the target was reached.
class Tracker {
 public:
  Tracker(const Problem& problem, const OptimizerConfig& config)
      : problem_(problem), config_(config) {}

  void offer(std::span<const double> point, double value) {
    if (value < best_value_) {
      best_value_ = value;
      best_point_.assign(point.begin(), point.end());
    }
  }

  void offer_population(const Matrix& individuals, std::span<const double> fitness) {
    for (std::size_t i = 0; i < individuals.rows(); ++i) offer(individuals.row(i), fitness[i]);
  }

  /// Closes iteration `it`; returns true when the loop should stop.
  bool close_iteration(std::size_t it) {
    trajectory_.push_back(best_value_);
    if (!success_at_ && std::abs(best_value_ - problem_.target) <= config_.success_tolerance)
      success_at_ = it;
    return success_at_.has_value() && config_.stop_on_success;
  }

  RunResult finish(std::uint64_t seed, double seconds) && {
    RunResult r;
    r.seed = seed;
    r.best_value = best_value_;
    r.best_point = std::move(best_point_);
    r.iterations_to_success = success_at_;
    r.succeeded = success_at_.has_value();
    r.wall_time = seconds;
    r.trajectory = std::move(trajectory_);
    return r;
  }

 private:
  const Problem& problem_;
  const OptimizerConfig& config_;
  double best_value_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_point_;
  std::vector<double> trajectory_;
  std::optional<std::size_t> success_at_;
};

void run_bsa(const Problem& problem, const OptimizerConfig& config, RngStream& rng, Tracker& tracker) {
  auto [current, historical] = bsa_init(problem, config.population_size, rng);
  tracker.offer_population(current.individuals, current.fitness);
  if (tracker.close_iteration(0)) return;

  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    historical = bsa_selection1(current.individuals, historical, rng);
    const double amplitude = 3.0 * standard_normal(rng);
    Matrix trial = bsa_mutation(current.individuals, historical, amplitude);
    trial = bsa_crossover(current.individuals, trial, config.mixrate, rng);
    trial = boundary_control(std::move(trial), problem.bounds, rng);
    const auto trial_fitness = evaluate_rows(problem.objective, trial);
    current = bsa_selection2(current, trial, trial_fitness);
    tracker.offer_population(current.individuals, current.fitness);
    if (tracker.close_iteration(it)) return;
  }
}

// DE/rand/1/bin
void run_de(const Problem& problem, const OptimizerConfig& config, RngStream& rng, Tracker& tracker) {
  const std::size_t n = config.population_size;
  const std::size_t d = problem.dim;
  Population pop{random_population(problem.bounds, n, rng), {}};
  pop.fitness = evaluate_rows(problem.objective, pop.individuals);
  tracker.offer_population(pop.individuals, pop.fitness);
  if (tracker.close_iteration(0)) return;

  std::vector<double> trial(d);
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r1 = i, r2 = i, r3 = i;
      if (n >= 4) {
        do r1 = rng.below(n); while (r1 == i);
        do r2 = rng.below(n); while (r2 == i || r2 == r1);
        do r3 = rng.below(n); while (r3 == i || r3 == r1 || r3 == r2);
      }
      const std::size_t forced = rng.below(d);
      for (std::size_t j = 0; j < d; ++j) {
        if (j == forced || rng.next_unit() < config.de_cr) {
          trial[j] = pop.individuals(r1, j) +
                     config.de_f * (pop.individuals(r2, j) - pop.individuals(r3, j));
          if (trial[j] < problem.bounds.low[j] || trial[j] > problem.bounds.up[j])
            trial[j] = uniform(rng, problem.bounds.low[j], problem.bounds.up[j]);
        } else {
          trial[j] = pop.individuals(i, j);
        }
      }
      const double f = problem.objective(trial);
      if (f <= pop.fitness[i]) {
        std::copy(trial.begin(), trial.end(), pop.individuals.row(i).begin());
        pop.fitness[i] = f;
      }
    }
    tracker.offer_population(pop.individuals, pop.fitness);
    if (tracker.close_iteration(it)) return;
  }
}

// Constriction-coefficient PSO with velocity clamping to the box width.
void run_pso(const Problem& problem, const OptimizerConfig& config, RngStream& rng, Tracker& tracker) {
  const std::size_t n = config.population_size;
  const std::size_t d = problem.dim;
  const Bounds& b = problem.bounds;
  Matrix x = random_population(b, n, rng);
  Matrix v(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double w = b.up[j] - b.low[j];
      v(i, j) = uniform(rng, -w, w) * 0.1;
    }
  std::vector<double> fx = evaluate_rows(problem.objective, x);
  Matrix pbest = x;
  std::vector<double> pbest_f = fx;
  std::size_t g = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  tracker.offer_population(x, fx);
  if (tracker.close_iteration(0)) return;

  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double vmax = b.up[j] - b.low[j];
        double vel = config.pso_w * v(i, j) +
                     config.pso_c1 * rng.next_unit() * (pbest(i, j) - x(i, j)) +
                     config.pso_c2 * rng.next_unit() * (pbest(g, j) - x(i, j));
        vel = std::clamp(vel, -vmax, vmax);
        double pos = x(i, j) + vel;
        if (pos < b.low[j] || pos > b.up[j]) {
          pos = std::clamp(pos, b.low[j], b.up[j]);
          vel = 0.0;
        }
        v(i, j) = vel;
        x(i, j) = pos;
      }
      fx[i] = problem.objective(x.row(i));
      if (fx[i] < pbest_f[i]) {
        pbest_f[i] = fx[i];
        std::copy(x.row(i).begin(), x.row(i).end(), pbest.row(i).begin());
      }
    }
    g = static_cast<std::size_t>(std::min_element(pbest_f.begin(), pbest_f.end()) - pbest_f.begin());
    tracker.offer_population(pbest, pbest_f);
    if (tracker.close_iteration(it)) return;
  }
}

double abc_fitness(double f) { return f >= 0.0 ? 1.0 / (1.0 + f) : 1.0 + std::abs(f); }

// Karaboga's artificial bee colony: population_size / 2 food sources.
void run_abc(const Problem& problem, const OptimizerConfig& config, RngStream& rng, Tracker& tracker) {
  const std::size_t sources = std::max<std::size_t>(1, config.population_size / 2);
  const std::size_t d = problem.dim;
  const Bounds& b = problem.bounds;
  Matrix food = random_population(b, sources, rng);
  std::vector<double> f = evaluate_rows(problem.objective, food);
  std::vector<std::size_t> trials(sources, 0);
  tracker.offer_population(food, f);
  if (tracker.close_iteration(0)) return;

  std::vector<double> candidate(d);
  auto try_neighbour = [&](std::size_t i) {
    std::size_t k = i;
    if (sources > 1) {
      do k = rng.below(sources); while (k == i);
    }
    const std::size_t j = rng.below(d);
    std::copy(food.row(i).begin(), food.row(i).end(), candidate.begin());
    const double phi = uniform(rng, -1.0, 1.0);
    candidate[j] = std::clamp(food(i, j) + phi * (food(i, j) - food(k, j)), b.low[j], b.up[j]);
    const double fc = problem.objective(candidate);
    if (abc_fitness(fc) > abc_fitness(f[i])) {
      std::copy(candidate.begin(), candidate.end(), food.row(i).begin());
      f[i] = fc;
      trials[i] = 0;
    } else {
      ++trials[i];
    }
  };

  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    for (std::size_t i = 0; i < sources; ++i) try_neighbour(i);

    double total = 0.0;
    for (double v : f) total += abc_fitness(v);
    for (std::size_t o = 0; o < sources; ++o) {
      double pick = rng.next_unit() * total;
      std::size_t i = 0;
      for (; i + 1 < sources; ++i) {
        pick -= abc_fitness(f[i]);
        if (pick < 0.0) break;
      }
      try_neighbour(i);
    }
    tracker.offer_population(food, f);

    const auto worst = static_cast<std::size_t>(std::max_element(trials.begin(), trials.end()) - trials.begin());
    if (trials[worst] > config.abc_limit) {
      for (std::size_t j = 0; j < d; ++j) food(worst, j) = uniform(rng, b.low[j], b.up[j]);
      f[worst] = problem.objective(food.row(worst));
      trials[worst] = 0;
      tracker.offer(food.row(worst), f[worst]);
    }
    if (tracker.close_iteration(it)) return;
  }
}

// Yang's firefly algorithm; distances are measured in box-normalised units
// and the random-walk amplitude decays geometrically.
void run_ff(const Problem& problem, const OptimizerConfig& config, RngStream& rng, Tracker& tracker) {
  const std::size_t n = config.population_size;
  const std::size_t d = problem.dim;
  const Bounds& b = problem.bounds;
  Matrix x = random_population(b, n, rng);
  std::vector<double> light = evaluate_rows(problem.objective, x);
  tracker.offer_population(x, light);
  if (tracker.close_iteration(0)) return;

  double alpha = config.ff_alpha;
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    const Matrix snapshot = x;
    const std::vector<double> snapshot_light = light;
    for (std::size_t i = 0; i < n; ++i) {
      bool moved = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (!(snapshot_light[k] < snapshot_light[i])) continue;
        double r2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = (x(i, j) - snapshot(k, j)) / (b.up[j] - b.low[j]);
          r2 += diff * diff;
        }
        const double beta = config.ff_beta0 * std::exp(-config.ff_gamma * r2);
        for (std::size_t j = 0; j < d; ++j) {
          x(i, j) += beta * (snapshot(k, j) - x(i, j)) +
                     alpha * (rng.next_unit() - 0.5) * (b.up[j] - b.low[j]);
        }
        moved = true;
      }
      if (!moved) {
        for (std::size_t j = 0; j < d; ++j)
          x(i, j) += alpha * (rng.next_unit() - 0.5) * (b.up[j] - b.low[j]);
      }
      clamp_into(x.row(i), b);
      const double fi = problem.objective(x.row(i));
      // The brightest firefly only accepts improving random moves.
      if (!moved && fi > snapshot_light[i]) {
        std::copy(snapshot.row(i).begin(), snapshot.row(i).end(), x.row(i).begin());
      } else {
        light[i] = fi;
      }
    }
    alpha *= config.ff_alpha_decay;
    tracker.offer_population(x, light);
    if (tracker.close_iteration(it)) return;
  }
}

}  // namespace

BsaPopulations bsa_init(const Problem& problem, std::size_t population_size, RngStream& rng) {
  if (population_size < 1) throw Error(ErrorKind::parameter, "population size must be at least 1");
  BsaPopulations out;
  out.current.individuals = random_population(problem.bounds, population_size, rng);
  out.current.fitness = evaluate_rows(problem.objective, out.current.individuals);
  out.historical = random_population(problem.bounds, population_size, rng);
  return out;
}

Matrix bsa_selection1(const Matrix& current, const Matrix& historical, RngStream& rng) {
  const double a = rng.next_unit();
  const double b = rng.next_unit();
  return bsa_selection1(current, historical, a < b, rng);
}

Matrix bsa_selection1(const Matrix& current, const Matrix& historical, bool adopt_current,
                      RngStream& rng) {
  require_same_shape(current, historical, "bsa_selection1");
  const Matrix& source = adopt_current ? current : historical;
  const auto order = permute(rng, source.rows());
  Matrix out(source.rows(), source.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto src = source.row(order[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix bsa_mutation(const Matrix& current, const Matrix& historical, double amplitude) {
  require_same_shape(current, historical, "bsa_mutation");
  Matrix out(current.rows(), current.cols());
  for (std::size_t i = 0; i < current.rows(); ++i)
    for (std::size_t j = 0; j < current.cols(); ++j)
      out(i, j) = current(i, j) + amplitude * (historical(i, j) - current(i, j));
  return out;
}

CrossoverMap bsa_crossover_map(std::size_t rows, std::size_t cols, double mixrate, RngStream& rng) {
  if (!(mixrate > 0.0 && mixrate <= 1.0))
    throw Error(ErrorKind::parameter, "mixrate must lie in (0, 1]");
  CrossoverMap map(rows, cols, true);
  if (cols == 0) return map;
  const double a = rng.next_unit();
  const double b = rng.next_unit();
  if (a < b) {
    for (std::size_t i = 0; i < rows; ++i) {
      const auto order = permute(rng, cols);
      auto count = static_cast<std::size_t>(
          std::ceil(mixrate * rng.next_unit() * static_cast<double>(cols)));
      count = std::clamp<std::size_t>(count, 1, cols);
      for (std::size_t k = 0; k < count; ++k) map.set(i, order[k], false);
    }
  } else {
    for (std::size_t i = 0; i < rows; ++i) map.set(i, rng.below(cols), false);
  }
  return map;
}

Matrix bsa_apply_map(const Matrix& current, const Matrix& mutant, const CrossoverMap& map) {
  require_same_shape(current, mutant, "bsa_apply_map");
  if (map.rows() != current.rows() || map.cols() != current.cols())
    throw Error(ErrorKind::shape, "bsa_apply_map: map shape mismatch");
  Matrix out = mutant;
  for (std::size_t i = 0; i < current.rows(); ++i)
    for (std::size_t j = 0; j < current.cols(); ++j)
      if (map.keeps_current(i, j)) out(i, j) = current(i, j);
  return out;
}

Matrix bsa_crossover(const Matrix& current, const Matrix& mutant, double mixrate, RngStream& rng) {
  require_same_shape(current, mutant, "bsa_crossover");
  return bsa_apply_map(current, mutant, bsa_crossover_map(current.rows(), current.cols(), mixrate, rng));
}

Matrix boundary_control(Matrix trial, const Bounds& bounds, RngStream& rng) {
  if (trial.cols() != bounds.dim()) throw Error(ErrorKind::shape, "boundary_control: dimension mismatch");
  for (std::size_t i = 0; i < trial.rows(); ++i)
    for (std::size_t j = 0; j < trial.cols(); ++j)
      if (trial(i, j) < bounds.low[j] || trial(i, j) > bounds.up[j])
        trial(i, j) = uniform(rng, bounds.low[j], bounds.up[j]);
  return trial;
}

Population bsa_selection2(const Population& current, const Matrix& trial,
                          std::span<const double> trial_fitness) {
  require_same_shape(current.individuals, trial, "bsa_selection2");
  if (trial_fitness.size() != trial.rows() || current.fitness.size() != current.individuals.rows())
    throw Error(ErrorKind::shape, "bsa_selection2: fitness length mismatch");
  Population out = current;
  for (std::size_t i = 0; i < trial.rows(); ++i) {
    if (trial_fitness[i] < current.fitness[i]) {
      std::copy(trial.row(i).begin(), trial.row(i).end(), out.individuals.row(i).begin());
      out.fitness[i] = trial_fitness[i];
    }
  }
  return out;
}

RunResult run_optimizer(Algorithm algo, const Problem& problem, const OptimizerConfig& config,
                        std::uint64_t seed) {
  config.validate();
  if (problem.bounds.dim() != problem.dim)
    throw Error(ErrorKind::shape, "problem bounds do not match its dimension");
  RngStream rng(seed);
  Tracker tracker(problem, config);
  const auto start = std::chrono::steady_clock::now();
  switch (algo) {
    case Algorithm::bsa: run_bsa(problem, config, rng, tracker); break;
    case Algorithm::de: run_de(problem, config, rng, tracker); break;
    case Algorithm::pso: run_pso(problem, config, rng, tracker); break;
    case Algorithm::abc: run_abc(problem, config, rng, tracker); break;
    case Algorithm::ff: run_ff(problem, config, rng, tracker); break;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  return std::move(tracker).finish(seed, elapsed.count());
}

}  // namespace evokit::optimizers
