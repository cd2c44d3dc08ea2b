#include "evokit/clustering_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "evokit/errors.hpp"

namespace evokit::clustering {

void Dataset::validate() const {
  if (points.rows() < 1 || points.cols() < 1) throw Error(ErrorKind::input, "dataset is empty");
  if (ground_truth_centroids && ground_truth_centroids->cols() != points.cols())
    throw Error(ErrorKind::shape, "ground-truth centroids do not match the data dimension");
  if (labels) {
    if (labels->size() != points.rows())
      throw Error(ErrorKind::shape, "label count does not match the number of points");
    if (ground_truth_centroids)
      for (std::size_t l : *labels)
        if (l >= ground_truth_centroids->rows())
          throw Error(ErrorKind::input, "label references a missing cluster");
  }
}

double squared_euclidean(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::shape, "euclidean: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

double euclidean(std::span<const double> x, std::span<const double> y) {
  return std::sqrt(squared_euclidean(x, y));
}

double intra_cluster(const Matrix& data, std::span<const std::size_t> members) {
  if (members.empty()) throw Error(ErrorKind::input, "intra_cluster: empty cluster");
  if (members.size() == 1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      sum += euclidean(data.row(members[i]), data.row(members[j]));
  // Each unordered pair stands for two ordered pairs.
  const double n = static_cast<double>(members.size());
  return 2.0 * sum / (n * (n - 1.0));
}

double intra_cluster(const Matrix& cluster_points) {
  std::vector<std::size_t> all(cluster_points.rows());
  std::iota(all.begin(), all.end(), 0);
  return intra_cluster(cluster_points, all);
}

double inter_cluster(const Matrix& data, std::span<const std::size_t> a,
                     std::span<const std::size_t> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::input, "inter_cluster: empty cluster");
  const auto va = mean_of(data, a);
  const auto vb = mean_of(data, b);
  double sum = 0.0;
  for (std::size_t i : a) sum += euclidean(data.row(i), vb);
  for (std::size_t i : b) sum += euclidean(data.row(i), va);
  return sum / static_cast<double>(a.size() + b.size());
}

double inter_cluster(const Matrix& a_points, const Matrix& b_points) {
  if (a_points.empty() || b_points.empty()) throw Error(ErrorKind::input, "inter_cluster: empty cluster");
  Matrix both = a_points;
  for (std::size_t i = 0; i < b_points.rows(); ++i) both.append_row(b_points.row(i));
  std::vector<std::size_t> a(a_points.rows()), b(b_points.rows());
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), a_points.rows());
  return inter_cluster(both, a, b);
}

double min_distance(const Matrix& data, std::span<const std::size_t> a,
                    std::span<const std::size_t> b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : a)
    for (std::size_t j : b) best = std::min(best, squared_euclidean(data.row(i), data.row(j)));
  return std::sqrt(best);
}

double percentile_rank(std::span<const double> values, double x) {
  if (values.empty()) throw Error(ErrorKind::input, "percentile_rank: empty sample");
  double below = 0.0, equal = 0.0;
  for (double v : values) {
    if (v < x) below += 1.0;
    else if (v == x) equal += 1.0;
  }
  return 100.0 * (below + 0.5 * equal) / static_cast<double>(values.size());
}

Quartiles quartiles(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::input, "quartiles: empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

std::vector<std::vector<std::size_t>> members_by_cluster(std::span<const std::size_t> assignment,
                                                         std::size_t k) {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= k) throw Error(ErrorKind::input, "assignment references a missing cluster");
    out[assignment[i]].push_back(i);
  }
  return out;
}

Matrix gather_rows(const Matrix& data, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(data.row(rows[i]).begin(), data.row(rows[i]).end(), out.row(i).begin());
  return out;
}

std::vector<double> mean_of(const Matrix& data, std::span<const std::size_t> rows) {
  std::vector<double> m(data.cols(), 0.0);
  if (rows.empty()) return m;
  for (std::size_t r : rows)
    for (std::size_t c = 0; c < data.cols(); ++c) m[c] += data(r, c);
  for (double& v : m) v /= static_cast<double>(rows.size());
  return m;
}

std::size_t nearest_centroid(const Matrix& centroids, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < centroids.rows(); ++k) {
    const double d = squared_euclidean(centroids.row(k), x);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::vector<std::size_t> assign_nearest(const Matrix& data, const Matrix& centroids) {
  std::vector<std::size_t> out(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) out[i] = nearest_centroid(centroids, data.row(i));
  return out;
}

double solution_inter(const Matrix& data, const std::vector<std::vector<std::size_t>>& members) {
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].empty()) continue;
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (members[j].empty()) continue;
      sum += inter_cluster(data, members[i], members[j]);
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

std::pair<std::vector<double>, std::vector<double>> data_bounds(const Matrix& data) {
  std::vector<double> lo(data.cols(), std::numeric_limits<double>::infinity());
  std::vector<double> hi(data.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < data.rows(); ++i)
    for (std::size_t j = 0; j < data.cols(); ++j) {
      lo[j] = std::min(lo[j], data(i, j));
      hi[j] = std::max(hi[j], data(i, j));
    }
  return {lo, hi};
}

}  // namespace evokit::clustering
