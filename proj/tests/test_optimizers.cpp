#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "evokit/benchfns.hpp"
#include "evokit/errors.hpp"
#include "evokit/optimizers.hpp"
#include "synthetic.hpp"

using namespace evokit;
using namespace evokit::optimizers;

namespace {

std::vector<std::vector<double>> sorted_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < m.rows(); ++r) rows.emplace_back(m.row(r).begin(), m.row(r).end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

Problem sphere_problem(std::size_t dim, double low, double up) {
  return {"sphere", dim,
          [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
          },
          Bounds::box(dim, low, up), 0.0};
}

}  // namespace

TEST_CASE("bsa_init") {
  RngStream rng(1);
  auto flat = bsa_init(sphere_problem(3, 2.0, 2.0), 5, rng);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(flat.current.individuals(r, c) == 2.0);
      CHECK(flat.historical(r, c) == 2.0);
    }

  const auto problem = sphere_problem(10, -5.0, 5.0);
  RngStream a(7), b(7);
  const auto pa = bsa_init(problem, 30, a);
  const auto pb = bsa_init(problem, 30, b);
  CHECK(pa.current.individuals.rows() == 30);
  CHECK(pa.current.individuals.cols() == 10);
  CHECK(pa.historical.rows() == 30);
  CHECK(pa.current.individuals == pb.current.individuals);
  CHECK(pa.historical == pb.historical);
  CHECK(pa.current.fitness == evaluate_rows(problem.objective, pa.current.individuals));
  for (std::size_t r = 0; r < 30; ++r) {
    CHECK(problem.bounds.contains(pa.current.individuals.row(r)));
    CHECK(problem.bounds.contains(pa.historical.row(r)));
  }
}

TEST_CASE("bsa_selection1") {
  std::mt19937_64 gen(3);
  const Matrix p = synth::random_matrix(gen, 8, 3);
  const Matrix old = synth::random_matrix(gen, 8, 3);
  RngStream rng(4);
  CHECK(sorted_rows(bsa_selection1(p, old, true, rng)) == sorted_rows(p));
  CHECK(sorted_rows(bsa_selection1(p, old, false, rng)) == sorted_rows(old));

  int adopted = 0;
  for (int i = 0; i < 2000; ++i) {
    const Matrix next = bsa_selection1(p, old, rng);
    const auto rows = sorted_rows(next);
    CHECK((rows == sorted_rows(p) || rows == sorted_rows(old)));
    adopted += rows == sorted_rows(p);
  }
  // P(a < b) = 1/2.
  CHECK(std::abs(adopted - 1000) < 120);
}

TEST_CASE("bsa_mutation") {
  std::mt19937_64 gen(5);
  const Matrix p = synth::random_matrix(gen, 5, 3);
  const Matrix old = synth::random_matrix(gen, 5, 3);
  CHECK(bsa_mutation(p, old, 0.0) == p);
  CHECK(bsa_mutation(p, p, 2.7) == p);
  CHECK(bsa_mutation(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3, 6}}), 0.5) == Matrix::from_rows({{2, 4}}));

  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = synth::random_matrix(gen, 5, 3);
    const Matrix b = synth::random_matrix(gen, 5, 3);
    const double f = std::normal_distribution<double>(0, 3)(gen);
    const Matrix m = bsa_mutation(a, b, f);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(m(r, c) - (a(r, c) + f * (b(r, c) - a(r, c)))) <= 1e-15);
  }
  CHECK_THROWS_AS(bsa_mutation(p, Matrix(2, 2), 1.0), Error);
}

TEST_CASE("bsa crossover") {
  std::mt19937_64 gen(6);
  const Matrix p = synth::random_matrix(gen, 4, 3);
  const Matrix mutant = synth::random_matrix(gen, 4, 3, 2, 3);  // differs from p everywhere
  CHECK(bsa_apply_map(p, mutant, CrossoverMap(4, 3, true)) == p);
  CHECK(bsa_apply_map(p, mutant, CrossoverMap(4, 3, false)) == mutant);

  // Each row takes at least one mutant gene, for every shape and mixrate.
  for (std::size_t rows = 1; rows <= 4; ++rows)
    for (std::size_t cols = 1; cols <= 5; ++cols)
      for (double mix : {0.01, 0.3, 1.0})
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
          RngStream rng(seed);
          const auto map = bsa_crossover_map(rows, cols, mix, rng);
          for (std::size_t r = 0; r < rows; ++r) {
            std::size_t taken = 0;
            for (std::size_t c = 0; c < cols; ++c) taken += !map.keeps_current(r, c);
            CHECK(taken >= 1);
          }
        }

  RngStream rng(9);
  const Matrix t = bsa_crossover(p, mutant, 1.0, rng);
  for (std::size_t r = 0; r < 4; ++r) {
    std::size_t differs = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK((t(r, c) == p(r, c) || t(r, c) == mutant(r, c)));
      differs += t(r, c) != p(r, c);
    }
    CHECK(differs >= 1);
  }
}

TEST_CASE("boundary_control") {
  const Bounds b = Bounds::box(2, 0.0, 1.0);
  RngStream rng(10);
  const Matrix inside = Matrix::from_rows({{0.0, 0.5}, {0.99, 1.0}});
  CHECK(boundary_control(inside, b, rng) == inside);

  const Matrix out = boundary_control(Matrix::from_rows({{10.0, 0.25}}), b, rng);
  CHECK(out(0, 0) >= 0.0);
  CHECK(out(0, 0) <= 1.0);
  CHECK(out(0, 1) == 0.25);

  std::mt19937_64 gen(11);
  const Bounds wide = Bounds::box(4, -3.0, 2.0);
  const Matrix wild = synth::random_matrix(gen, 2500, 4, -100, 100);
  const Matrix fixed = boundary_control(wild, wide, rng);
  for (std::size_t r = 0; r < fixed.rows(); ++r) {
    CHECK(wide.contains(fixed.row(r)));
    for (std::size_t c = 0; c < 4; ++c)
      if (wild(r, c) >= -3.0 && wild(r, c) <= 2.0) CHECK(fixed(r, c) == wild(r, c));
  }
}

TEST_CASE("bsa_selection2") {
  Population p{Matrix::from_rows({{1}, {2}, {3}}), {5.0, 5.0, 5.0}};
  const Matrix t = Matrix::from_rows({{10}, {20}, {30}});

  auto better = bsa_selection2(p, t, std::vector<double>{1, 1, 1});
  CHECK(better.individuals == t);
  auto worse = bsa_selection2(p, t, std::vector<double>{9, 9, 9});
  CHECK(worse.individuals == p.individuals);
  auto mixed = bsa_selection2(p, t, std::vector<double>{4, 6, 5});
  CHECK(mixed.individuals == Matrix::from_rows({{10}, {2}, {3}}));
  CHECK(mixed.fitness == std::vector<double>{4, 5, 5});
}

TEST_CASE("run_optimizer") {
  OptimizerConfig cfg;
  cfg.max_iterations = 2000;
  const auto problem = make_problem(benchfns::lookup("F14"), 2, SearchRange::default_space);

  SUBCASE("BSA solves Sphere") {
    int ok = 0;
    for (std::uint64_t s = 0; s < 30; ++s) ok += run_optimizer(Algorithm::bsa, problem, cfg, s).succeeded;
    CHECK(ok >= 28);
  }

  SUBCASE("zero iterations returns the best initial individual") {
    cfg.max_iterations = 0;
    for (Algorithm a : kAllAlgorithms) {
      const auto r = run_optimizer(a, problem, cfg, 3);
      CHECK(r.trajectory.size() == 1);
      CHECK(r.best_value == r.trajectory.front());
      CHECK(r.best_value == problem.objective(r.best_point));
    }
    RngStream rng(3);
    const auto init = bsa_init(problem, cfg.population_size, rng);
    CHECK(run_optimizer(Algorithm::bsa, problem, cfg, 3).best_value ==
          *std::min_element(init.current.fitness.begin(), init.current.fitness.end()));
  }

  SUBCASE("determinism, bounds, monotone best and the success flag") {
    cfg.max_iterations = 300;
    cfg.stop_on_success = false;
    for (const char* id : {"F1", "F3", "F11", "F16"}) {
      const auto prob = make_problem(benchfns::lookup(id), 2, SearchRange::r1);
      for (Algorithm a : kAllAlgorithms) {
        const auto r1 = run_optimizer(a, prob, cfg, 42);
        const auto r2 = run_optimizer(a, prob, cfg, 42);
        CHECK(r1.best_value == r2.best_value);
        CHECK(r1.best_point == r2.best_point);
        CHECK(r1.trajectory == r2.trajectory);
        CHECK(r1.iterations_to_success == r2.iterations_to_success);
        CHECK(prob.bounds.contains(r1.best_point));
        CHECK(r1.trajectory.size() == cfg.max_iterations + 1);
        for (std::size_t i = 1; i < r1.trajectory.size(); ++i) CHECK(r1.trajectory[i] <= r1.trajectory[i - 1]);
        CHECK(r1.succeeded == (std::abs(r1.best_value - prob.target) <= cfg.success_tolerance));
        CHECK(r1.succeeded == r1.iterations_to_success.has_value());
      }
    }
  }

  SUBCASE("early stop records the first successful iteration") {
    const auto r = run_optimizer(Algorithm::de, problem, cfg, 1);
    REQUIRE(r.succeeded);
    CHECK(r.trajectory.size() == *r.iterations_to_success + 1);
    CHECK(std::abs(r.trajectory.back()) <= 1e-6);
    if (*r.iterations_to_success > 0) CHECK(std::abs(r.trajectory[r.trajectory.size() - 2]) > 1e-6);
  }
}

TEST_CASE("config validation and names") {
  OptimizerConfig cfg;
  cfg.population_size = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.success_tolerance = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.mixrate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);

  for (Algorithm a : kAllAlgorithms) CHECK(parse_algorithm(to_string(a)) == a);
  CHECK_THROWS_AS(parse_algorithm("ga"), Error);
  CHECK(parse_range("R2") == SearchRange::r2);
  const auto p = make_problem(benchfns::lookup("F12"), 10, SearchRange::r3);
  CHECK(p.bounds.low == std::vector<double>(10, -500.0));
  CHECK_THROWS_AS(make_problem(benchfns::lookup("F14"), 3, SearchRange::r1), Error);
}
