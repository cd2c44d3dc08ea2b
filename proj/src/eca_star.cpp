#include "evokit/eca_star.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "evokit/errors.hpp"

namespace evokit::eca {

using clustering::assign_nearest;
using clustering::euclidean;
using clustering::intra_cluster;
using clustering::members_by_cluster;
using clustering::min_distance;
using clustering::quartiles;
using clustering::solution_inter;
using stochastics::uniform;

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct MemberQuartiles {
  std::vector<double> q1, q2, q3;
};

MemberQuartiles member_quartiles(const Matrix& pts, std::span<const std::size_t> members) {
  MemberQuartiles out;
  std::vector<double> column(members.size());
  for (std::size_t d = 0; d < pts.cols(); ++d) {
    for (std::size_t i = 0; i < members.size(); ++i) column[i] = pts(members[i], d);
    const auto q = quartiles(column);
    out.q1.push_back(q.q1);
    out.q2.push_back(q.q2);
    out.q3.push_back(q.q3);
  }
  return out;
}

std::vector<double> quartile_mean(const MemberQuartiles& q) {
  std::vector<double> c(q.q1.size());
  for (std::size_t d = 0; d < c.size(); ++d) c[d] = (q.q1[d] + q.q2[d] + q.q3[d]) / 3.0;
  return c;
}

struct PartitionQuality {
  std::vector<double> intra;
  double inter = 0.0;
};

PartitionQuality member_quality(const Matrix& pts, const std::vector<std::vector<std::size_t>>& members) {
  PartitionQuality q;
  q.intra.reserve(members.size());
  for (const auto& m : members) q.intra.push_back(m.empty() ? 0.0 : intra_cluster(pts, m));
  q.inter = solution_inter(pts, members);
  return q;
}

/// Quality of the partition obtained by sending every point to its nearest
/// row of `centroids`.
PartitionQuality induced_quality(const Matrix& pts, const Matrix& centroids) {
  const auto assignment = assign_nearest(pts, centroids);
  return member_quality(pts, members_by_cluster(assignment, centroids.rows()));
}

/// Relabels clusters so that only non-empty ones remain, in increasing id
/// order. Returns the number of clusters dropped.
std::size_t drop_empty(std::vector<std::size_t>& assignment, std::size_t& k,
                       std::vector<std::size_t>* kept_ids = nullptr) {
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t a : assignment) ++counts[a];
  std::vector<std::size_t> remap(k, kNone);
  std::size_t next = 0;
  if (kept_ids) kept_ids->clear();
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) {
      remap[c] = next++;
      if (kept_ids) kept_ids->push_back(c);
    }
  }
  for (auto& a : assignment) a = remap[a];
  const std::size_t dropped = k - next;
  k = next;
  return dropped;
}

void set_row(Matrix& m, std::size_t r, std::span<const double> values) {
  std::copy(values.begin(), values.end(), m.row(r).begin());
}

}  // namespace

void EcaParams::validate() const {
  if (social_ranks < 2) throw Error(ErrorKind::parameter, "social class ranks S must be at least 2");
  if (!(density_threshold > 0.0 && density_threshold < 1.0))
    throw Error(ErrorKind::parameter, "cluster density threshold must lie in (0, 1)");
  if (!(levy_alpha > 1.0 && levy_alpha <= 2.0))
    throw Error(ErrorKind::parameter, "Levy alpha must lie in (1, 2]");
  if (max_cycles < 1) throw Error(ErrorKind::parameter, "max cycles must be at least 1");
  if (!(stop_tolerance >= 0.0)) throw Error(ErrorKind::parameter, "stop tolerance must be non-negative");
}

InitialAssignment init_assign(const Dataset& data, std::size_t social_ranks) {
  data.validate();
  if (social_ranks < 2) throw Error(ErrorKind::parameter, "social class ranks S must be at least 2");
  const Matrix& pts = data.points;
  const std::size_t n = pts.rows();
  const std::size_t dim = pts.cols();

  // Largest number of digits whose cluster count stays within the cap.
  std::size_t max_digits = 0;
  for (std::size_t k = 1; k <= kMaxInitialClusters / social_ranks; k *= social_ranks) ++max_digits;
  if (max_digits == 0) {
    std::ostringstream msg;
    msg << "S = " << social_ranks << " exceeds the initial cluster cap of " << kMaxInitialClusters
        << "; lower the number of social class ranks";
    throw Error(ErrorKind::parameter, msg.str());
  }

  InitialAssignment out;
  if (dim <= max_digits) {
    out.rank_dims.resize(dim);
    std::iota(out.rank_dims.begin(), out.rank_dims.end(), 0);
  } else {
    std::vector<double> variance(dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += pts(i, d);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) variance[d] += (pts(i, d) - mean) * (pts(i, d) - mean);
    }
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return variance[a] > variance[b]; });
    out.rank_dims.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(max_digits));
    std::sort(out.rank_dims.begin(), out.rank_dims.end());
  }

  out.k = 1;
  for (std::size_t i = 0; i < out.rank_dims.size(); ++i) out.k *= social_ranks;

  out.assignment.assign(n, 0);
  std::vector<double> sorted(n);
  std::size_t radix = 1;
  for (std::size_t d : out.rank_dims) {
    for (std::size_t i = 0; i < n; ++i) sorted[i] = pts(i, d);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      const double x = pts(i, d);
      const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
      const auto hi = std::upper_bound(lo, sorted.end(), x);
      const double below = static_cast<double>(lo - sorted.begin());
      const double equal = static_cast<double>(hi - lo);
      const double rank = 100.0 * (below + 0.5 * equal) / static_cast<double>(n);
      const auto digit = std::min<std::size_t>(
          static_cast<std::size_t>(std::floor(rank * static_cast<double>(social_ranks) / 100.0)),
          social_ranks - 1);
      out.assignment[i] += digit * radix;
    }
    radix *= social_ranks;
  }
  return out;
}

EcaState make_state(const Dataset& data, const InitialAssignment& init) {
  if (init.assignment.size() != data.size())
    throw Error(ErrorKind::shape, "initial assignment does not cover the dataset");
  EcaState s;
  s.clustering.assignment = init.assignment;
  s.k = init.k;
  std::tie(s.data_low, s.data_up) = clustering::data_bounds(data.points);
  return s;
}

EcaState clustering_one(EcaState state, const Dataset& data, double density_threshold,
                        RngStream& rng) {
  const Matrix& pts = data.points;
  const std::size_t n = pts.rows();
  const std::size_t dim = pts.cols();
  auto& assignment = state.clustering.assignment;
  if (assignment.size() != n) throw Error(ErrorKind::shape, "clustering_one: assignment size mismatch");

  state.k_empty = drop_empty(assignment, state.k);
  if (state.k == 0) throw Error(ErrorKind::degenerate, "clustering_one: no cluster has members");

  auto members = members_by_cluster(assignment, state.k);
  std::vector<MemberQuartiles> q(state.k);
  Matrix centroids(state.k, dim);
  for (std::size_t c = 0; c < state.k; ++c) {
    q[c] = member_quartiles(pts, members[c]);
    set_row(centroids, c, quartile_mean(q[c]));
  }

  // Fold low-density clusters into their nearest dense neighbour.
  std::vector<bool> sparse(state.k);
  bool any_dense = false;
  for (std::size_t c = 0; c < state.k; ++c) {
    sparse[c] = static_cast<double>(members[c].size()) / static_cast<double>(n) < density_threshold;
    any_dense = any_dense || !sparse[c];
  }
  state.k_dth = 0;
  if (any_dense) {
    for (std::size_t c = 0; c < state.k; ++c) {
      if (!sparse[c]) continue;
      std::size_t target = kNone;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < state.k; ++o) {
        if (sparse[o]) continue;
        const double d = euclidean(centroids.row(c), centroids.row(o));
        if (d < best) {
          best = d;
          target = o;
        }
      }
      for (std::size_t i : members[c]) assignment[i] = target;
      ++state.k_dth;
    }
    if (state.k_dth > 0) {
      std::vector<std::size_t> kept;
      drop_empty(assignment, state.k, &kept);
      members = members_by_cluster(assignment, state.k);
      Matrix kept_centroids(state.k, dim);
      std::vector<MemberQuartiles> kept_q(state.k);
      for (std::size_t c = 0; c < state.k; ++c) {
        kept_q[c] = member_quartiles(pts, members[c]);
        set_row(kept_centroids, c, quartile_mean(kept_q[c]));
      }
      centroids = std::move(kept_centroids);
      q = std::move(kept_q);
    }
  }

  state.density.assign(state.k, 0.0);
  Matrix old_centroids(state.k, dim);
  for (std::size_t c = 0; c < state.k; ++c) {
    state.density[c] = static_cast<double>(members[c].size()) / static_cast<double>(n);
    for (std::size_t d = 0; d < dim; ++d) old_centroids(c, d) = uniform(rng, q[c].q1[d], q[c].q3[d]);
  }

  const PartitionQuality current = induced_quality(pts, centroids);
  const PartitionQuality old = induced_quality(pts, old_centroids);
  state.clustering.intra = current.intra;
  state.clustering.inter = current.inter;
  state.clustering.old_intra = old.intra;
  state.clustering.old_inter = old.inter;

  state.selected = Matrix(state.k, dim);
  for (std::size_t c = 0; c < state.k; ++c)
    set_row(state.selected, c,
            current.intra[c] < old.intra[c] ? centroids.row(c) : old_centroids.row(c));

  state.clustering.centroids = std::move(centroids);
  state.clustering.historical_centroids = std::move(old_centroids);
  return state;
}

const Matrix& mut_over(EcaState& state, const EcaParams& params, RngStream& rng) {
  const Matrix& c = state.clustering.centroids;
  const Matrix& old = state.clustering.historical_centroids;
  const auto& intra = state.clustering.intra;
  const auto& old_intra = state.clustering.old_intra;
  const std::size_t k = c.rows();
  const std::size_t dim = c.cols();
  if (k != state.k || !old.same_shape(c) || intra.size() != k || old_intra.size() != k)
    throw Error(ErrorKind::shape, "mut_over: state is not populated by clustering_one");

  const stochastics::LevyParams levy{params.levy_alpha, params.levy_scale};
  const bool take_mutant = state.clustering.old_inter > state.clustering.inter;

  state.learning = Matrix(k, dim);
  state.mutant = Matrix(k, dim);
  state.selected = Matrix(k, dim);
  state.mut_over = Matrix(k, dim);
  for (std::size_t i = 0; i < k; ++i) {
    const bool tighter = intra[i] < old_intra[i];
    const double step = stochastics::levy_step(rng, levy);
    for (std::size_t d = 0; d < dim; ++d) {
      const double hi = tighter ? old(i, d) - c(i, d) : c(i, d) - old(i, d);
      state.learning(i, d) = hi;
      state.mutant(i, d) = c(i, d) + step * hi;
      state.selected(i, d) = rng.next_unit() < 0.5 ? old(i, d) : c(i, d);
      state.mut_over(i, d) = take_mutant ? state.mutant(i, d) : state.selected(i, d);
    }
  }

  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      double& v = state.mut_over(i, d);
      if (v < state.data_low[d] || v > state.data_up[d]) v = uniform(rng, state.data_low[d], state.data_up[d]);
    }
  return state.mut_over;
}

EcaState clustering_two(EcaState state, const Dataset& data) {
  const Matrix& pts = data.points;
  auto& assignment = state.clustering.assignment;
  if (state.k == 0) throw Error(ErrorKind::degenerate, "clustering_two: no live cluster");
  const auto members = members_by_cluster(assignment, state.k);

  std::vector<std::size_t> parent(state.k);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t i = 0; i + 1 < state.k; ++i) {
    const std::size_t j = i + 1;
    if (members[i].empty() || members[j].empty()) continue;
    const double dmin = min_distance(pts, members[i], members[j]);
    const double sigma = std::min(dmin - intra_cluster(pts, members[i]), dmin - intra_cluster(pts, members[j]));
    if (sigma <= 0.0) parent[find(j)] = find(i);
  }

  std::vector<std::size_t> group(state.k, kNone);
  std::size_t groups = 0;
  for (std::size_t c = 0; c < state.k; ++c) {
    const std::size_t root = find(c);
    if (group[root] == kNone) group[root] = groups++;
    group[c] = group[root];
  }
  if (groups == state.k) return state;

  // Merged clusters take the member-weighted mean of their centroids.
  const std::size_t dim = pts.cols();
  auto merge_rows = [&](const Matrix& m) {
    if (m.rows() != state.k) return m;
    Matrix out(groups, dim);
    std::vector<double> weight(groups, 0.0);
    for (std::size_t c = 0; c < state.k; ++c) {
      const double w = static_cast<double>(members[c].size());
      weight[group[c]] += w;
      for (std::size_t d = 0; d < dim; ++d) out(group[c], d) += w * m(c, d);
    }
    for (std::size_t g = 0; g < groups; ++g)
      for (std::size_t d = 0; d < dim; ++d) out(g, d) /= weight[g];
    return out;
  };
  state.mut_over = merge_rows(state.mut_over);
  state.clustering.centroids = merge_rows(state.clustering.centroids);
  state.clustering.historical_centroids = merge_rows(state.clustering.historical_centroids);

  for (auto& a : assignment) a = group[a];
  state.k = groups;
  const auto merged = members_by_cluster(assignment, state.k);
  const PartitionQuality q = member_quality(pts, merged);
  state.clustering.intra = q.intra;
  state.clustering.inter = q.inter;
  return state;
}

EcaResult run_eca_star(const Dataset& data, const EcaParams& params) {
  params.validate();
  data.validate();
  const Matrix& pts = data.points;
  RngStream rng(params.seed);

  EcaState state = make_state(data, init_assign(data, params.social_ranks));
  EcaResult result;
  std::vector<double> prev_intra;
  double prev_inter = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t cycle = 1; cycle <= params.max_cycles; ++cycle) {
    state = clustering_one(std::move(state), data, params.density_threshold, rng);
    mut_over(state, params, rng);
    state = clustering_two(std::move(state), data);

    // Fitness evaluation on the partition induced by the mut-over centroids.
    auto assignment = assign_nearest(pts, state.mut_over);
    std::size_t k = state.k;
    std::vector<std::size_t> kept;
    drop_empty(assignment, k, &kept);
    Matrix mo(k, pts.cols());
    for (std::size_t c = 0; c < k; ++c) set_row(mo, c, state.mut_over.row(kept[c]));
    state.mut_over = std::move(mo);
    state.clustering.assignment = std::move(assignment);
    state.k = k;

    const PartitionQuality q = member_quality(pts, members_by_cluster(state.clustering.assignment, k));
    result.cycles = cycle;
    result.k_trace.push_back(k);

    bool unchanged = prev_intra.size() == q.intra.size() &&
                     std::abs(q.inter - prev_inter) <= params.stop_tolerance;
    for (std::size_t c = 0; unchanged && c < q.intra.size(); ++c)
      unchanged = std::abs(q.intra[c] - prev_intra[c]) <= params.stop_tolerance;
    prev_intra = q.intra;
    prev_inter = q.inter;
    if (unchanged) {
      result.converged = true;
      break;
    }
  }

  const auto members = members_by_cluster(state.clustering.assignment, state.k);
  Clustering out;
  out.assignment = state.clustering.assignment;
  out.centroids = Matrix(state.k, pts.cols());
  for (std::size_t c = 0; c < state.k; ++c)
    set_row(out.centroids, c, quartile_mean(member_quartiles(pts, members[c])));
  const PartitionQuality q = member_quality(pts, members);
  out.intra = q.intra;
  out.inter = q.inter;
  out.historical_centroids = state.clustering.historical_centroids;
  out.old_intra = state.clustering.old_intra;
  out.old_inter = state.clustering.old_inter;
  result.clustering = std::move(out);
  result.mut_over = state.mut_over;
  return result;
}

}  // namespace evokit::eca
