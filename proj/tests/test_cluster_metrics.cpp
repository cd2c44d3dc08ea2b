#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "evokit/cluster_metrics.hpp"
#include "evokit/errors.hpp"
#include "synthetic.hpp"

using namespace evokit;
using namespace evokit::metrics;
using clustering::Clustering;

namespace {

Clustering make(std::vector<std::size_t> assignment, const Matrix& centroids) {
  Clustering c;
  c.assignment = std::move(assignment);
  c.centroids = centroids;
  return c;
}

// Mutual information over the contingency table, natural log.
double nmi_oracle(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const double n = static_cast<double>(a.size());
  std::map<std::size_t, double> pa, pb;
  std::map<std::pair<std::size_t, std::size_t>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1 / n;
    pb[b[i]] += 1 / n;
    pab[{a[i], b[i]}] += 1 / n;
  }
  double ha = 0, hb = 0, mi = 0;
  for (auto [k, p] : pa) ha -= p * std::log(p);
  for (auto [k, p] : pb) hb -= p * std::log(p);
  for (auto [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
  return mi / std::sqrt(ha * hb);
}

}  // namespace

TEST_CASE("sse") {
  const Matrix pts = Matrix::from_rows({{0, 0}, {1, 1}});
  CHECK(sse(pts, std::vector<std::size_t>{0, 1}, pts) == 0.0);
  CHECK(sse(Matrix::from_rows({{3, 0}}), std::vector<std::size_t>{0}, Matrix::from_rows({{0, 0}})) == 9.0);

  std::mt19937_64 gen(31);
  for (int t = 0; t < 100; ++t) {
    const Matrix p = synth::random_matrix(gen, 10, 3, -5, 5);
    const Matrix c = synth::random_matrix(gen, 3, 3, -5, 5);
    std::vector<std::size_t> a(10);
    for (auto& x : a) x = gen() % 3;
    double direct = 0.0;
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 3; ++j) direct += (p(i, j) - c(a[i], j)) * (p(i, j) - c(a[i], j));
    const double got = sse(p, a, c);
    CHECK(std::abs(got - direct) <= 1e-12 * std::max(1.0, direct));

    // Relabel clusters 0 <-> 2 and translate everything by the same offset.
    std::vector<std::size_t> relabeled(a);
    for (auto& x : relabeled) x = 2 - x;
    Matrix cr(3, 3), pt = p;
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t j = 0; j < 3; ++j) cr(2 - k, j) = c(k, j) + 7.0;
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 3; ++j) pt(i, j) += 7.0;
    CHECK(std::abs(sse(pt, relabeled, cr) - got) <= 1e-9);
  }
  CHECK(sse(clustering::Dataset{pts, std::nullopt, std::nullopt}, make({0, 0}, Matrix::from_rows({{0, 0}}))) == 2.0);
}

TEST_CASE("nmse and eps_ratio") {
  CHECK(nmse(0, 5, 2) == 0.0);
  CHECK(nmse(100, 10, 2) == 5.0);
  CHECK_THROWS_AS(nmse(1, 0, 2), Error);
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> u(0, 1e6);
  for (int t = 0; t < 1000; ++t) {
    const double s = u(gen);
    const std::size_t n = 1 + gen() % 1000, d = 1 + gen() % 64;
    CHECK(std::abs(nmse(s, n, d) * static_cast<double>(n * d) - s) <= 1e-9 * std::max(1.0, s));
  }

  CHECK(eps_ratio(0.001) == 0.0);
  CHECK(std::abs(eps_ratio(0.002, 0.001) - 1.0) < 1e-12);
  CHECK(std::abs(eps_ratio(1.092e2) / 1.092e5 - 1.0) < 1e-4);
  CHECK_THROWS_AS(eps_ratio(1.0, 0.0), Error);
  CHECK_THROWS_AS(eps_ratio(1.0, -1.0), Error);
  double prev = eps_ratio(0.0);
  for (double s = 0.5; s < 100; s *= 1.7) {
    CHECK(eps_ratio(s) > prev);
    prev = eps_ratio(s);
  }
}

TEST_CASE("centroid_index") {
  const Matrix gt = Matrix::from_rows({{0, 0}, {10, 10}});
  CHECK(centroid_index(gt, gt) == 0);
  CHECK(centroid_index(Matrix::from_rows({{0, 0.1}, {0.2, 0}}), gt) == 1);
  CHECK(centroid_index(Matrix::from_rows({{10, 10}, {0, 0}}), gt) == 0);
  // Three solution centroids on two targets: one orphaned solution centroid
  // in the reverse direction.
  CHECK(centroid_index(Matrix::from_rows({{0, 0}, {10, 10}, {10, 11}}), gt) == 1);

  std::mt19937_64 gen(33);
  for (int t = 0; t < 200; ++t) {
    const Matrix a = synth::random_matrix(gen, 1 + gen() % 6, 2);
    const Matrix b = synth::random_matrix(gen, 1 + gen() % 6, 2);
    CHECK(centroid_index(a, b) == centroid_index(b, a));
  }
}

TEST_CASE("csi") {
  const Matrix c2 = Matrix::from_rows({{0, 0}, {10, 0}});
  const std::vector<std::size_t> truth{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  const auto t = make(truth, c2);
  CHECK(csi(t, t) == 1.0);

  // Same partition, labels and centroid rows swapped.
  std::vector<std::size_t> swapped(truth);
  for (auto& x : swapped) x = 1 - x;
  CHECK(csi(make(swapped, Matrix::from_rows({{10, 0}, {0, 0}})), t) == 1.0);

  std::vector<std::size_t> moved(truth);
  moved[0] = 1;
  CHECK(std::abs(csi(make(moved, c2), t) - 0.9) < 1e-15);

  CHECK_THROWS_AS(csi(make({0, 1}, c2), t), Error);
}

TEST_CASE("nmi") {
  const std::vector<std::size_t> a{0, 0, 1, 1}, b{0, 1, 0, 1};
  CHECK(std::abs(nmi(a, b)) < 1e-15);
  CHECK(std::abs(nmi(a, a) - 1.0) < 1e-15);
  CHECK(std::abs(nmi(a, std::vector<std::size_t>{5, 5, 2, 2}) - 1.0) < 1e-15);
  CHECK(nmi(std::vector<std::size_t>{0, 0}, std::vector<std::size_t>{3, 3}) == 1.0);
  CHECK(nmi(std::vector<std::size_t>{0, 0}, std::vector<std::size_t>{0, 1}) == 0.0);
  CHECK_THROWS_AS(nmi(a, std::vector<std::size_t>{0}), Error);

  std::mt19937_64 gen(34);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + gen() % 30;
    std::vector<std::size_t> x(n), y(n);
    for (auto& v : x) v = gen() % 4;
    for (auto& v : y) v = gen() % 3;
    x[0] = 0, x[1] = 1, y[0] = 0, y[1] = 1;  // at least two clusters on each side
    const double got = nmi(x, y);
    CHECK(got >= 0.0);
    CHECK(got <= 1.0);
    CHECK(std::abs(got - std::clamp(nmi_oracle(x, y), 0.0, 1.0)) <= 1e-12);
    CHECK(std::abs(got - nmi(y, x)) <= 1e-12);
  }
}

TEST_CASE("evaluate") {
  const auto d = synth::four_blobs(3);
  const auto gt = ground_truth_clustering(d);
  CHECK(gt.assignment == *d.labels);
  const auto q = evaluate(d, gt);
  CHECK(*q.ci == 0.0);
  CHECK(*q.csi == 1.0);
  CHECK(std::abs(*q.nmi - 1.0) < 1e-12);
  CHECK(q.nmse == doctest::Approx(q.sse / (200.0 * 2.0)));
  CHECK(q.eps_ratio == doctest::Approx((q.sse - 0.001) / 0.001));

  auto bare = d;
  bare.ground_truth_centroids.reset();
  bare.labels.reset();
  const auto nogt = evaluate(bare, gt);
  CHECK(!nogt.ci);
  CHECK(!nogt.csi);
  CHECK(!nogt.nmi);
}
