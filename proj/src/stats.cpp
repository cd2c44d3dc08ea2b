#include "evokit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evokit/errors.hpp"

namespace evokit::stats {
namespace {

/// Average ranks (1-based) of `values`; ties share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

SummaryStats describe(std::span<const double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.mean = mean;
  s.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.best = *lo;
  s.worst = *hi;
  return s;
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::iterations ? "iters" : "value";
}

Metric parse_metric(std::string_view name) {
  if (name == "iters" || name == "iterations") return Metric::iterations;
  if (name == "value" || name == "best_value") return Metric::best_value;
  throw Error(ErrorKind::parameter, "unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::a: return "+";
    case Winner::b: return "-";
    case Winner::tie: return "=";
  }
  return "?";
}

SummaryStats summarize(std::span<const optimizers::RunResult> results, Metric metric) {
  if (results.empty()) throw Error(ErrorKind::input, "summarize: no runs");
  std::vector<double> values;
  double time = 0.0;
  SummaryStats s;
  for (const auto& r : results) {
    time += r.wall_time;
    if (!r.succeeded) {
      ++s.n_failure;
      continue;
    }
    ++s.n_success;
    values.push_back(metric == Metric::iterations ? static_cast<double>(*r.iterations_to_success)
                                                  : r.best_value);
  }
  const SummaryStats loc = describe(values);
  s.mean = loc.mean;
  s.sd = loc.sd;
  s.best = loc.best;
  s.worst = loc.worst;
  s.mean_exec_time = time / static_cast<double>(results.size());
  return s;
}

SummaryStats summarize_values(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::input, "summarize_values: empty sample");
  SummaryStats s = describe(values);
  s.n_success = values.size();
  return s;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha) {
  if (a.size() != b.size())
    throw Error(ErrorKind::shape, "wilcoxon_signed_rank: samples differ in length");
  if (a.empty()) throw Error(ErrorKind::input, "wilcoxon_signed_rank: empty samples");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult out;
  out.n_effective = diffs.size();
  if (diffs.empty()) return out;

  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
  const std::vector<double> ranks = average_ranks(magnitudes);
  for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? out.r_plus : out.r_minus) += ranks[i];

  const std::size_t n = diffs.size();
  if (n <= kExactWilcoxonLimit) {
    // Null distribution of 2*R+ by dynamic programming over doubled ranks,
    // which are integers even with average ranks.
    std::vector<long> doubled(n);
    long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = std::lround(2.0 * ranks[i]);
      total += doubled[i];
    }
    std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
    count[0] = 1.0;
    long reach = 0;
    for (long r : doubled) {
      for (long s = reach; s >= 0; --s)
        if (count[s] != 0.0) count[s + r] += count[s];
      reach += r;
    }
    const long observed = std::lround(2.0 * out.r_plus);
    const double denom = std::ldexp(1.0, static_cast<int>(n));
    double lower = 0.0, upper = 0.0;
    for (long s = 0; s <= total; ++s) {
      if (s <= observed) lower += count[s];
      if (s >= observed) upper += count[s];
    }
    out.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / denom);
    out.exact = true;
  } else {
    const double nn = static_cast<double>(n);
    double tie_term = 0.0;
    std::vector<double> sorted = magnitudes;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(out.r_plus - mean) - 0.5) / std::sqrt(var);
    out.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    out.exact = false;
  }

  if (out.p_value < alpha && out.r_plus != out.r_minus)
    out.winner = out.r_minus > out.r_plus ? Winner::a : Winner::b;
  return out;
}

std::vector<SuccessRatio> success_ratio(const std::map<std::string, std::vector<std::size_t>>& table,
                                        std::size_t runs) {
  std::vector<SuccessRatio> out;
  for (const auto& [algo, counts] : table) {
    SuccessRatio r{algo, 0, 0};
    for (std::size_t c : counts) {
      if (c > runs) throw Error(ErrorKind::input, "success count exceeds run total for " + algo);
      (c > 0 ? r.success : r.failure)++;
    }
    out.push_back(r);
  }
  return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::shape, "spearman: need two equal-length samples of size >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace evokit::stats
