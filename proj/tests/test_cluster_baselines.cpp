#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "evokit/cluster_baselines.hpp"
#include "evokit/cluster_metrics.hpp"
#include "evokit/errors.hpp"
#include "synthetic.hpp"

using namespace evokit;
using namespace evokit::baselines;

namespace {

Dataset two_blobs(std::uint64_t seed, std::size_t per_blob) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 0.5);
  Dataset d{Matrix(0, 2), std::nullopt, std::nullopt};
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t i = 0; i < per_blob; ++i) {
      const double p[2] = {b * 6.0 + z(gen), z(gen)};
      d.points.append_row(p);
    }
  return d;
}

// Smallest SSE over every split of the points into two non-empty groups.
double best_two_partition(const Matrix& pts) {
  const std::size_t n = pts.rows();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
    double total = 0.0;
    for (int side = 0; side < 2; ++side) {
      double mx = 0, my = 0, cnt = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (static_cast<int>(mask >> i & 1u) == side) {
          mx += pts(i, 0);
          my += pts(i, 1);
          ++cnt;
        }
      mx /= cnt;
      my /= cnt;
      for (std::size_t i = 0; i < n; ++i)
        if (static_cast<int>(mask >> i & 1u) == side)
          total += (pts(i, 0) - mx) * (pts(i, 0) - mx) + (pts(i, 1) - my) * (pts(i, 1) - my);
    }
    best = std::min(best, total);
  }
  return best;
}

bool is_data_row(const Matrix& data, std::span<const double> row) {
  for (std::size_t i = 0; i < data.rows(); ++i)
    if (std::equal(row.begin(), row.end(), data.row(i).begin())) return true;
  return false;
}

}  // namespace

TEST_CASE("k = 1 gives the global mean") {
  std::mt19937_64 gen(21);
  const Dataset d{synth::random_matrix(gen, 30, 3), std::nullopt, std::nullopt};
  for (KmInit init : {KmInit::random, KmInit::plusplus}) {
    const auto c = kmeans(d, {1, 300, 5, init});
    std::vector<std::size_t> all(30);
    for (std::size_t i = 0; i < 30; ++i) all[i] = i;
    const auto mean = clustering::mean_of(d.points, all);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(c.centroids(0, j) - mean[j]) <= 1e-12);
  }
}

TEST_CASE("k = N gives zero SSE") {
  std::mt19937_64 gen(22);
  const Dataset d{synth::random_matrix(gen, 15, 2), std::nullopt, std::nullopt};
  for (KmInit init : {KmInit::random, KmInit::plusplus}) {
    const auto c = kmeans(d, {15, 300, 3, init});
    CHECK(metrics::sse(d, c) == 0.0);
    CHECK(std::set<std::size_t>(c.assignment.begin(), c.assignment.end()).size() == 15);
  }
}

TEST_CASE("two blobs match the exhaustive partition oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = two_blobs(seed, 6);
    const double oracle = best_two_partition(d.points);
    const auto c = kmeans(d, {2, 300, seed, KmInit::plusplus});
    CHECK(std::abs(metrics::sse(d, c) - oracle) <= 1e-9);
  }
}

TEST_CASE("kmeans_pp_seed") {
  std::mt19937_64 gen(23);
  const Dataset d{synth::random_matrix(gen, 12, 2), std::nullopt, std::nullopt};
  stochastics::RngStream rng(1);

  const Matrix one = kmeans_pp_seed(d, 1, rng);
  CHECK(one.rows() == 1);
  CHECK(is_data_row(d.points, one.row(0)));

  // With distinct points, every point must be picked once when k = N.
  const Matrix all = kmeans_pp_seed(d, 12, rng);
  std::set<std::vector<double>> distinct;
  for (std::size_t i = 0; i < all.rows(); ++i) {
    CHECK(is_data_row(d.points, all.row(i)));
    distinct.emplace(all.row(i).begin(), all.row(i).end());
  }
  CHECK(distinct.size() == 12);

  // Weights 1 and 100 after seeding at 0 on the line {0, 1, 10}.
  const Dataset line{Matrix::from_rows({{0}, {1}, {10}}), std::nullopt, std::nullopt};
  const int trials = 200000;
  int far = 0;
  for (int t = 0; t < trials; ++t) {
    const Matrix s = kmeans_pp_seed(line, 2, rng, 0);
    CHECK(s(0, 0) == 0.0);
    if (s(1, 0) == 10.0) ++far;
  }
  const double p = 100.0 / 101.0;
  const double se = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(static_cast<double>(far) / trials - p) < 5 * se);
}

TEST_CASE("random_seed draws distinct points") {
  std::mt19937_64 gen(24);
  const Dataset d{synth::random_matrix(gen, 9, 2), std::nullopt, std::nullopt};
  stochastics::RngStream rng(4);
  for (int t = 0; t < 50; ++t) {
    const Matrix s = random_seed(d, 9, rng);
    std::set<std::vector<double>> distinct;
    for (std::size_t i = 0; i < s.rows(); ++i) distinct.emplace(s.row(i).begin(), s.row(i).end());
    CHECK(distinct.size() == 9);
  }
}

TEST_CASE("lloyd properties") {
  std::mt19937_64 gen(25);
  for (int t = 0; t < 60; ++t) {
    const Dataset d{synth::random_matrix(gen, 40, 2, -3, 3), std::nullopt, std::nullopt};
    stochastics::RngStream rng(t);
    const std::size_t k = 1 + gen() % 6;
    std::vector<double> trace;
    const auto c = lloyd(d, random_seed(d, k, rng), 300, &trace);
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
    CHECK(c.k() == k);
    CHECK(c.intra.size() == k);
    const auto [lo, hi] = clustering::data_bounds(d.points);
    for (std::size_t r = 0; r < c.centroids.rows(); ++r)
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(c.centroids(r, j) >= lo[j]);
        CHECK(c.centroids(r, j) <= hi[j]);
      }
  }
}

TEST_CASE("empty clusters are reseeded") {
  // The third centroid starts far from every point and would stay empty.
  const Dataset d{Matrix::from_rows({{0, 0}, {0, 1}, {5, 0}, {5, 1}, {9, 9}}), std::nullopt, std::nullopt};
  const auto c = lloyd(d, Matrix::from_rows({{0, 0.5}, {6, 3}, {100, 100}}), 300);
  CHECK(std::set<std::size_t>(c.assignment.begin(), c.assignment.end()).size() == 3);
}

TEST_CASE("plusplus is no worse than random seeding") {
  std::size_t no_worse = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset d = two_blobs(1000 + seed, 30);
    const double pp = metrics::sse(d, kmeans(d, {2, 300, seed, KmInit::plusplus}));
    const double rnd = metrics::sse(d, kmeans(d, {2, 300, seed, KmInit::random}));
    if (pp <= rnd + 1e-9) ++no_worse;
  }
  CHECK(no_worse >= 95);
}

TEST_CASE("configuration errors") {
  const Dataset d{Matrix::from_rows({{0}, {1}}), std::nullopt, std::nullopt};
  CHECK_THROWS_AS(kmeans(d, {0, 300, 0, KmInit::plusplus}), Error);
  CHECK_THROWS_AS(kmeans(d, {3, 300, 0, KmInit::random}), Error);
  const auto a = kmeans(d, {2, 300, 9, KmInit::random});
  const auto b = kmeans(d, {2, 300, 9, KmInit::random});
  CHECK(a.assignment == b.assignment);
}
