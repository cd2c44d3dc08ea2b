#include "evokit/cluster_baselines.hpp"

#include <algorithm>
#include <limits>

#include "evokit/errors.hpp"

namespace evokit::baselines {

using clustering::assign_nearest;
using clustering::members_by_cluster;
using clustering::squared_euclidean;

namespace {

void check_k(const Dataset& data, std::size_t k) {
  if (k == 0 || k > data.size())
    throw Error(ErrorKind::parameter, "k must lie in [1, N]; got k = " + std::to_string(k) +
                                          " for N = " + std::to_string(data.size()));
}

double assignment_sse(const Matrix& pts, const Matrix& centroids, std::span<const std::size_t> assignment) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.rows(); ++i) s += squared_euclidean(pts.row(i), centroids.row(assignment[i]));
  return s;
}

}  // namespace

Matrix kmeans_pp_seed(const Dataset& data, std::size_t k, RngStream& rng, std::optional<std::size_t> first) {
  check_k(data, k);
  const Matrix& pts = data.points;
  const std::size_t n = pts.rows();
  Matrix seeds(0, pts.cols());
  const std::size_t f = first ? *first : static_cast<std::size_t>(rng.below(n));
  if (f >= n) throw Error(ErrorKind::parameter, "kmeans_pp_seed: first index out of range");
  seeds.append_row(pts.row(f));

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_euclidean(pts.row(i), pts.row(f));
  while (seeds.rows() < k) {
    double total = 0.0;
    for (double w : d2) total += w;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.next_unit() * total;
      double acc = 0.0;
      pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (target < acc && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave target just past the last partial sum.
      if (pick == n)
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    seeds.append_row(pts.row(pick));
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_euclidean(pts.row(i), pts.row(pick)));
  }
  return seeds;
}

Matrix random_seed(const Dataset& data, std::size_t k, RngStream& rng) {
  check_k(data, k);
  const auto order = stochastics::permute(rng, data.size());
  Matrix seeds(0, data.dim());
  for (std::size_t i = 0; i < k; ++i) seeds.append_row(data.points.row(order[i]));
  return seeds;
}

Clustering lloyd(const Dataset& data, Matrix centroids, std::size_t max_iters, std::vector<double>* sse_trace) {
  const Matrix& pts = data.points;
  const std::size_t k = centroids.rows();
  std::vector<std::size_t> assignment = assign_nearest(pts, centroids);
  if (sse_trace) sse_trace->push_back(assignment_sse(pts, centroids, assignment));

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    auto members = members_by_cluster(assignment, k);
    for (std::size_t c = 0; c < k; ++c) {
      if (members[c].empty()) {
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < pts.rows(); ++i) {
          const double d = squared_euclidean(pts.row(i), centroids.row(assignment[i]));
          if (d > best && members[assignment[i]].size() > 1) {
            best = d;
            far = i;
          }
        }
        auto& from = members[assignment[far]];
        from.erase(std::find(from.begin(), from.end(), far));
        assignment[far] = c;
        members[c].push_back(far);
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      const auto m = clustering::mean_of(pts, members[c]);
      std::copy(m.begin(), m.end(), centroids.row(c).begin());
    }
    auto next = assign_nearest(pts, centroids);
    if (sse_trace) sse_trace->push_back(assignment_sse(pts, centroids, next));
    const bool same = next == assignment;
    assignment = std::move(next);
    if (same) break;
  }

  Clustering out;
  out.assignment = std::move(assignment);
  // Final centroids are the means of the final members.
  const auto members = members_by_cluster(out.assignment, k);
  for (std::size_t c = 0; c < k; ++c)
    if (!members[c].empty()) {
      const auto m = clustering::mean_of(pts, members[c]);
      std::copy(m.begin(), m.end(), centroids.row(c).begin());
    }
  out.centroids = std::move(centroids);
  out.intra.reserve(k);
  for (const auto& m : members) out.intra.push_back(m.empty() ? 0.0 : clustering::intra_cluster(pts, m));
  out.inter = clustering::solution_inter(pts, members);
  return out;
}

Clustering kmeans(const Dataset& data, const KmConfig& config) {
  data.validate();
  check_k(data, config.k);
  RngStream rng(config.seed);
  Matrix seeds = config.init == KmInit::plusplus ? kmeans_pp_seed(data, config.k, rng)
                                                 : random_seed(data, config.k, rng);
  return lloyd(data, std::move(seeds), config.max_iters);
}

}  // namespace evokit::baselines
