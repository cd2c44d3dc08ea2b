#include "evokit/cluster_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "evokit/errors.hpp"

namespace evokit::metrics {

using clustering::euclidean;
using clustering::nearest_centroid;
using clustering::squared_euclidean;

double sse(const Matrix& points, std::span<const std::size_t> assignment, const Matrix& centroids) {
  if (assignment.size() != points.rows()) throw Error(ErrorKind::shape, "sse: assignment size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (assignment[i] >= centroids.rows()) throw Error(ErrorKind::input, "sse: assignment references a missing centroid");
    s += squared_euclidean(points.row(i), centroids.row(assignment[i]));
  }
  return s;
}

double sse(const Dataset& data, const Clustering& c) { return sse(data.points, c.assignment, c.centroids); }

double nmse(double sse, std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw Error(ErrorKind::parameter, "nmse: N * D must be positive");
  return sse / (static_cast<double>(n) * static_cast<double>(d));
}

double eps_ratio(double sse, double sse_opt) {
  if (!(sse_opt > 0.0)) throw Error(ErrorKind::parameter, "eps_ratio: sse_opt must be positive");
  return (sse - sse_opt) / sse_opt;
}

namespace {

std::size_t orphans(const Matrix& from, const Matrix& to) {
  std::vector<bool> hit(to.rows(), false);
  for (std::size_t i = 0; i < from.rows(); ++i) hit[nearest_centroid(to, from.row(i))] = true;
  return static_cast<std::size_t>(std::count(hit.begin(), hit.end(), false));
}

}  // namespace

std::size_t centroid_index(const Matrix& solution, const Matrix& truth) {
  if (solution.empty() || truth.empty()) throw Error(ErrorKind::input, "centroid_index: empty centroid set");
  if (solution.cols() != truth.cols()) throw Error(ErrorKind::shape, "centroid_index: dimension mismatch");
  return std::max(orphans(solution, truth), orphans(truth, solution));
}

double csi(const Clustering& solution, const Clustering& truth) {
  const std::size_t n = solution.assignment.size();
  if (n != truth.assignment.size()) throw Error(ErrorKind::shape, "csi: point counts differ");
  if (n == 0) throw Error(ErrorKind::input, "csi: no points");
  const std::size_t ka = solution.centroids.rows();
  const std::size_t kb = truth.centroids.rows();

  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(ka * kb);
  for (std::size_t i = 0; i < ka; ++i)
    for (std::size_t j = 0; j < kb; ++j)
      pairs.emplace_back(euclidean(solution.centroids.row(i), truth.centroids.row(j)), i, j);
  std::sort(pairs.begin(), pairs.end());

  std::vector<std::size_t> partner(ka, kb);
  std::vector<bool> taken(kb, false);
  for (const auto& [d, i, j] : pairs) {
    if (partner[i] != kb || taken[j]) continue;
    partner[i] = j;
    taken[j] = true;
  }

  std::size_t shared = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const std::size_t a = solution.assignment[p];
    if (a >= ka || truth.assignment[p] >= kb) throw Error(ErrorKind::input, "csi: assignment references a missing centroid");
    if (partner[a] == truth.assignment[p]) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(n);
}

double nmi(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::shape, "nmi: label counts differ");
  if (a.empty()) throw Error(ErrorKind::input, "nmi: no labels");
  const double n = static_cast<double>(a.size());
  std::map<std::size_t, double> ca, cb;
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    joint[{a[i], b[i]}] += 1.0;
  }
  auto entropy = [n](const std::map<std::size_t, double>& counts) {
    double h = 0.0;
    for (const auto& [label, c] : counts) h -= c / n * std::log(c / n);
    return h;
  };
  if (ca.size() == 1 || cb.size() == 1) return ca.size() == 1 && cb.size() == 1 ? 1.0 : 0.0;
  const double ha = entropy(ca);
  const double hb = entropy(cb);
  double mi = 0.0;
  for (const auto& [key, c] : joint) mi += c / n * std::log(c * n / (ca[key.first] * cb[key.second]));
  return std::clamp(mi / std::sqrt(ha * hb), 0.0, 1.0);
}

Clustering ground_truth_clustering(const Dataset& data) {
  if (!data.ground_truth_centroids) throw Error(ErrorKind::input, "dataset has no ground-truth centroids");
  Clustering gt;
  gt.centroids = *data.ground_truth_centroids;
  gt.assignment = data.labels ? *data.labels : clustering::assign_nearest(data.points, gt.centroids);
  return gt;
}

QualityReport evaluate(const Dataset& data, const Clustering& c, double sse_opt) {
  QualityReport r;
  r.sse = sse(data, c);
  r.nmse = nmse(r.sse, data.size(), data.dim());
  r.eps_ratio = eps_ratio(r.sse, sse_opt);
  if (data.ground_truth_centroids) {
    const Clustering gt = ground_truth_clustering(data);
    r.ci = static_cast<double>(centroid_index(c.centroids, gt.centroids));
    r.csi = csi(c, gt);
    r.nmi = nmi(c.assignment, gt.assignment);
  }
  return r;
}

}  // namespace evokit::metrics
