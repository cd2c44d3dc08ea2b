#include "evokit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "evokit/benchfns.hpp"
#include "evokit/errors.hpp"
#include "evokit/io.hpp"

namespace evokit::experiments {

using optimizers::Algorithm;
using optimizers::SearchRange;

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

std::vector<BenchCase> dimension_sweep(const std::vector<std::size_t>& dims) {
  std::vector<BenchCase> out;
  for (std::size_t d : dims)
    for (const auto& fn : benchfns::catalog()) {
      const std::size_t dim = fn.dimension_rule == benchfns::DimensionRule::scalable ? d : 2;
      out.push_back({std::string(fn.id), dim, SearchRange::default_space});
    }
  return out;
}

std::vector<BenchCase> range_sweep() {
  std::vector<BenchCase> out;
  for (SearchRange r : {SearchRange::r1, SearchRange::r2, SearchRange::r3})
    for (const auto& fn : benchfns::catalog()) out.push_back({std::string(fn.id), 2, r});
  return out;
}

std::string configuration_label(const BenchCase& c) {
  if (c.range != SearchRange::default_space) return std::string(optimizers::to_string(c.range));
  return "D=" + std::to_string(c.dim);
}

BenchReport run_bench_suite(const BenchSuiteConfig& config) {
  config.optimizer.validate();
  if (config.algorithms.empty() || config.cases.empty())
    throw Error(ErrorKind::parameter, "benchmark suite needs at least one algorithm and one function");
  BenchReport report{config, {}};
  std::vector<optimizers::Problem> problems;
  for (const auto& c : config.cases)
    problems.push_back(optimizers::make_problem(benchfns::lookup(c.function_id), c.dim, c.range));

  const std::size_t runs = config.optimizer.runs;
  for (const auto& c : config.cases)
    for (Algorithm a : config.algorithms) {
      BenchRecord rec;
      rec.bench = c;
      rec.algorithm = a;
      rec.runs.resize(runs);
      report.records.push_back(std::move(rec));
    }

  const std::size_t n_algo = config.algorithms.size();
  parallel_for(report.records.size() * runs, config.threads, [&](std::size_t task) {
    const std::size_t rec = task / runs, r = task % runs;
    auto& record = report.records[rec];
    record.runs[r] = optimizers::run_optimizer(record.algorithm, problems[rec / n_algo], config.optimizer,
                                               config.seed + r);
  });
  for (auto& rec : report.records) rec.summary = stats::summarize(rec.runs, config.metric);
  return report;
}

namespace {

std::vector<double> paired_metric(const BenchRecord& rec, stats::Metric metric, std::size_t max_iterations) {
  std::vector<double> out;
  for (const auto& r : rec.runs) {
    if (metric == stats::Metric::best_value) {
      out.push_back(r.best_value);
    } else {
      out.push_back(r.succeeded ? static_cast<double>(*r.iterations_to_success)
                                : static_cast<double>(max_iterations + 1));
    }
  }
  return out;
}

bool same_case(const BenchCase& x, const BenchCase& y) {
  return x.function_id == y.function_id && x.dim == y.dim && x.range == y.range;
}

}  // namespace

std::vector<WilcoxonRow> compare(const BenchReport& report, Algorithm a, Algorithm b, stats::Metric metric,
                                 double alpha) {
  std::vector<WilcoxonRow> rows;
  for (const auto& ra : report.records) {
    if (ra.algorithm != a) continue;
    const auto rb = std::find_if(report.records.begin(), report.records.end(), [&](const BenchRecord& r) {
      return r.algorithm == b && same_case(r.bench, ra.bench);
    });
    if (rb == report.records.end()) continue;
    const auto xa = paired_metric(ra, metric, report.config.optimizer.max_iterations);
    const auto xb = paired_metric(*rb, metric, report.config.optimizer.max_iterations);
    rows.push_back({ra.bench, stats::wilcoxon_signed_rank(xa, xb, alpha)});
  }
  if (rows.empty())
    throw Error(ErrorKind::input, "no cases were run for both " + std::string(optimizers::to_string(a)) + " and " +
                                      std::string(optimizers::to_string(b)));
  return rows;
}

std::vector<RatioRow> success_ratios(const BenchReport& report) {
  std::vector<std::string> configs;
  std::map<std::string, std::map<std::string, std::vector<std::size_t>>> table;
  for (const auto& rec : report.records) {
    const std::string label = configuration_label(rec.bench);
    if (std::find(configs.begin(), configs.end(), label) == configs.end()) configs.push_back(label);
    table[label][std::string(optimizers::to_string(rec.algorithm))].push_back(rec.summary.n_success);
  }
  std::vector<RatioRow> out;
  for (const auto& label : configs) {
    const auto ratios = stats::success_ratio(table[label], report.config.optimizer.runs);
    for (Algorithm a : report.config.algorithms) {
      const auto it = std::find_if(ratios.begin(), ratios.end(), [&](const stats::SuccessRatio& r) {
        return r.algorithm == optimizers::to_string(a);
      });
      if (it != ratios.end()) out.push_back({label, *it});
    }
  }
  return out;
}

namespace {

std::string opt_number(const std::optional<double>& v, std::optional<int> digits) {
  return v ? io::format_number(*v, digits) : "NC";
}

}  // namespace

std::string bench_stats_csv(const BenchReport& report, std::optional<int> digits) {
  std::ostringstream out;
  out << "function,algorithm,dim,range,metric,mean,sd,best,worst,exec_time,n_success,n_failure\n";
  for (const auto& rec : report.records) {
    const auto& s = rec.summary;
    out << rec.bench.function_id << ',' << optimizers::to_string(rec.algorithm) << ',' << rec.bench.dim << ','
        << optimizers::to_string(rec.bench.range) << ',' << stats::to_string(report.config.metric) << ','
        << opt_number(s.mean, digits) << ',' << opt_number(s.sd, digits) << ',' << opt_number(s.best, digits) << ','
        << opt_number(s.worst, digits) << ',' << io::format_number(s.mean_exec_time, digits) << ','
        << s.n_success << ',' << s.n_failure << '\n';
  }
  return out.str();
}

std::string wilcoxon_csv(const std::vector<WilcoxonRow>& rows, std::optional<int> digits) {
  std::ostringstream out;
  out << "function,dim,range,p_value,r_plus,r_minus,n_effective,exact,win\n";
  for (const auto& r : rows)
    out << r.bench.function_id << ',' << r.bench.dim << ',' << optimizers::to_string(r.bench.range) << ','
        << io::format_number(r.result.p_value, digits) << ',' << io::format_number(r.result.r_plus, digits) << ','
        << io::format_number(r.result.r_minus, digits) << ',' << r.result.n_effective << ','
        << (r.result.exact ? "true" : "false") << ',' << stats::to_string(r.result.winner) << '\n';
  return out.str();
}

std::string ratios_csv(const std::vector<RatioRow>& rows) {
  std::ostringstream out;
  out << "configuration,algorithm,success,failure\n";
  for (const auto& r : rows)
    out << r.configuration << ',' << r.ratio.algorithm << ',' << r.ratio.success << ',' << r.ratio.failure << '\n';
  return out.str();
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json summary_json(const stats::SummaryStats& s) {
  return {{"mean", optional_json(s.mean)},   {"sd", optional_json(s.sd)},
          {"best", optional_json(s.best)},   {"worst", optional_json(s.worst)},
          {"n_success", s.n_success},        {"n_failure", s.n_failure}};
}

json optimizer_json(const optimizers::OptimizerConfig& c) {
  return {{"population_size", c.population_size},
          {"max_iterations", c.max_iterations},
          {"runs", c.runs},
          {"success_tolerance", c.success_tolerance},
          {"stop_on_success", c.stop_on_success},
          {"mixrate", c.mixrate},
          {"de_f", c.de_f},
          {"de_cr", c.de_cr},
          {"pso_w", c.pso_w},
          {"pso_c1", c.pso_c1},
          {"pso_c2", c.pso_c2},
          {"abc_limit", c.abc_limit},
          {"ff_beta0", c.ff_beta0},
          {"ff_gamma", c.ff_gamma},
          {"ff_alpha", c.ff_alpha},
          {"ff_alpha_decay", c.ff_alpha_decay}};
}

optimizers::OptimizerConfig optimizer_from_json(const json& j) {
  optimizers::OptimizerConfig c;
  c.population_size = j.at("population_size");
  c.max_iterations = j.at("max_iterations");
  c.runs = j.at("runs");
  c.success_tolerance = j.at("success_tolerance");
  c.stop_on_success = j.at("stop_on_success");
  c.mixrate = j.at("mixrate");
  c.de_f = j.at("de_f");
  c.de_cr = j.at("de_cr");
  c.pso_w = j.at("pso_w");
  c.pso_c1 = j.at("pso_c1");
  c.pso_c2 = j.at("pso_c2");
  c.abc_limit = j.at("abc_limit");
  c.ff_beta0 = j.at("ff_beta0");
  c.ff_gamma = j.at("ff_gamma");
  c.ff_alpha = j.at("ff_alpha");
  c.ff_alpha_decay = j.at("ff_alpha_decay");
  return c;
}

json case_json(const BenchCase& c) {
  return {{"function", c.function_id}, {"dim", c.dim}, {"range", optimizers::to_string(c.range)}};
}

BenchCase case_from_json(const json& j) {
  return {j.at("function").get<std::string>(), j.at("dim").get<std::size_t>(),
          optimizers::parse_range(j.at("range").get<std::string>())};
}

}  // namespace

json to_json(const BenchReport& report) {
  json algos = json::array();
  for (Algorithm a : report.config.algorithms) algos.push_back(optimizers::to_string(a));
  json cases = json::array();
  for (const auto& c : report.config.cases) cases.push_back(case_json(c));
  json records = json::array();
  for (const auto& rec : report.records) {
    json runs = json::array();
    for (const auto& r : rec.runs)
      runs.push_back({{"seed", r.seed},
                      {"best_value", r.best_value},
                      {"best_point", r.best_point},
                      {"iterations_to_success",
                       r.iterations_to_success ? json(*r.iterations_to_success) : json(nullptr)},
                      {"succeeded", r.succeeded}});
    json rj = case_json(rec.bench);
    rj["algorithm"] = optimizers::to_string(rec.algorithm);
    rj["summary"] = summary_json(rec.summary);
    rj["runs"] = std::move(runs);
    records.push_back(std::move(rj));
  }
  return {{"kind", "bench-opt"},
          {"config",
           {{"algorithms", algos},
            {"cases", cases},
            {"optimizer", optimizer_json(report.config.optimizer)},
            {"metric", stats::to_string(report.config.metric)},
            {"seed", report.config.seed}}},
          {"records", records}};
}

BenchReport bench_report_from_json(const json& j) {
  try {
    if (j.at("kind") != "bench-opt") throw Error(ErrorKind::input, "not a bench-opt report");
    BenchReport report;
    const auto& cfg = j.at("config");
    for (const auto& a : cfg.at("algorithms")) report.config.algorithms.push_back(optimizers::parse_algorithm(a.get<std::string>()));
    for (const auto& c : cfg.at("cases")) report.config.cases.push_back(case_from_json(c));
    report.config.optimizer = optimizer_from_json(cfg.at("optimizer"));
    report.config.metric = stats::parse_metric(cfg.at("metric").get<std::string>());
    report.config.seed = cfg.at("seed");
    for (const auto& rj : j.at("records")) {
      BenchRecord rec;
      rec.bench = case_from_json(rj);
      rec.algorithm = optimizers::parse_algorithm(rj.at("algorithm").get<std::string>());
      for (const auto& r : rj.at("runs")) {
        optimizers::RunResult run;
        run.seed = r.at("seed");
        run.best_value = r.at("best_value");
        run.best_point = r.at("best_point").get<std::vector<double>>();
        if (!r.at("iterations_to_success").is_null()) run.iterations_to_success = r.at("iterations_to_success");
        run.succeeded = r.at("succeeded");
        rec.runs.push_back(std::move(run));
      }
      rec.summary = stats::summarize(rec.runs, report.config.metric);
      report.records.push_back(std::move(rec));
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("malformed bench-opt report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

std::string_view to_string(ClusterAlgorithm a) {
  switch (a) {
    case ClusterAlgorithm::eca_star: return "eca-star";
    case ClusterAlgorithm::kmeans: return "km";
    case ClusterAlgorithm::kmeans_pp: return "km++";
  }
  return "?";
}

ClusterAlgorithm parse_cluster_algorithm(std::string_view name) {
  if (name == "eca-star" || name == "eca") return ClusterAlgorithm::eca_star;
  if (name == "km" || name == "kmeans") return ClusterAlgorithm::kmeans;
  if (name == "km++" || name == "kmeans++") return ClusterAlgorithm::kmeans_pp;
  throw Error(ErrorKind::parameter, "unknown clustering algorithm '" + std::string(name) + "'");
}

clustering::Clustering cluster_once(const clustering::Dataset& data, ClusterAlgorithm algorithm,
                                    const ClusterSuiteConfig& config, std::uint64_t seed) {
  if (algorithm == ClusterAlgorithm::eca_star) {
    eca::EcaParams p = config.eca;
    p.seed = seed;
    return eca::run_eca_star(data, p).clustering;
  }
  std::size_t k = 0;
  if (config.k) k = *config.k;
  else if (data.ground_truth_centroids) k = data.ground_truth_centroids->rows();
  else throw Error(ErrorKind::parameter, "K-means needs --k when the dataset has no ground truth");
  baselines::KmConfig km;
  km.k = k;
  km.seed = seed;
  km.init = algorithm == ClusterAlgorithm::kmeans_pp ? baselines::KmInit::plusplus : baselines::KmInit::random;
  return baselines::kmeans(data, km);
}

ClusterReport run_cluster_suite(const ClusterSuiteConfig& config) {
  if (config.runs < 1) throw Error(ErrorKind::parameter, "runs must be at least 1");
  if (config.datasets.empty() || config.algorithms.empty())
    throw Error(ErrorKind::parameter, "cluster suite needs at least one dataset and one algorithm");
  config.eca.validate();
  ClusterReport report{config, {}};
  for (const auto& d : config.datasets)
    for (ClusterAlgorithm a : config.algorithms) {
      ClusterRecord rec;
      rec.dataset = d.name;
      rec.algorithm = a;
      rec.runs.resize(config.runs);
      report.records.push_back(std::move(rec));
    }
  const std::size_t n_algo = config.algorithms.size();
  parallel_for(report.records.size() * config.runs, config.threads, [&](std::size_t task) {
    const std::size_t rec = task / config.runs, r = task % config.runs;
    auto& record = report.records[rec];
    const auto& data = config.datasets[rec / n_algo].data;
    const std::uint64_t seed = config.seed + r;
    const auto c = cluster_once(data, record.algorithm, config, seed);
    record.runs[r] = {seed, c.k(), metrics::evaluate(data, c, config.sse_opt)};
  });

  for (auto& rec : report.records) {
    auto& m = rec.mean;
    for (const auto& run : rec.runs) {
      m.sse += run.quality.sse;
      m.nmse += run.quality.nmse;
      m.eps_ratio += run.quality.eps_ratio;
      if (run.quality.ci) {
        m.ci = m.ci.value_or(0.0) + *run.quality.ci;
        m.csi = m.csi.value_or(0.0) + *run.quality.csi;
        m.nmi = m.nmi.value_or(0.0) + *run.quality.nmi;
      }
    }
    const double n = static_cast<double>(rec.runs.size());
    m.sse /= n;
    m.nmse /= n;
    m.eps_ratio /= n;
    for (auto* field : {&m.ci, &m.csi, &m.nmi})
      if (*field) **field /= n;
  }
  return report;
}

std::string cluster_csv(const ClusterReport& report, std::optional<int> digits) {
  std::ostringstream out;
  out << "dataset,algorithm,runs,ci,csi,nmi,sse,nmse,eps_ratio\n";
  auto ext = [&](const std::optional<double>& v) { return v ? io::format_number(*v, digits) : std::string(); };
  for (const auto& rec : report.records) {
    const auto& m = rec.mean;
    out << rec.dataset << ',' << to_string(rec.algorithm) << ',' << rec.runs.size() << ',' << ext(m.ci) << ','
        << ext(m.csi) << ',' << ext(m.nmi) << ',' << io::format_number(m.sse, digits) << ','
        << io::format_number(m.nmse, digits) << ',' << io::format_number(m.eps_ratio, digits) << '\n';
  }
  return out.str();
}

namespace {

json quality_json(const metrics::QualityReport& q) {
  return {{"sse", q.sse}, {"nmse", q.nmse}, {"eps_ratio", q.eps_ratio},
          {"ci", optional_json(q.ci)}, {"csi", optional_json(q.csi)}, {"nmi", optional_json(q.nmi)}};
}

}  // namespace

json to_json(const ClusterReport& report) {
  const auto& c = report.config;
  json datasets = json::array();
  for (const auto& d : c.datasets)
    datasets.push_back({{"name", d.name},
                        {"n", d.data.size()},
                        {"dim", d.data.dim()},
                        {"ground_truth_k", d.data.ground_truth_centroids
                                               ? json(d.data.ground_truth_centroids->rows())
                                               : json(nullptr)}});
  json algos = json::array();
  for (auto a : c.algorithms) algos.push_back(to_string(a));
  json records = json::array();
  for (const auto& rec : report.records) {
    json runs = json::array();
    for (const auto& r : rec.runs) {
      json rj = quality_json(r.quality);
      rj["seed"] = r.seed;
      rj["k"] = r.k;
      runs.push_back(std::move(rj));
    }
    records.push_back({{"dataset", rec.dataset},
                       {"algorithm", to_string(rec.algorithm)},
                       {"mean", quality_json(rec.mean)},
                       {"runs", runs}});
  }
  return {{"kind", "cluster"},
          {"config",
           {{"datasets", datasets},
            {"algorithms", algos},
            {"social_ranks", c.eca.social_ranks},
            {"density_threshold", c.eca.density_threshold},
            {"levy_alpha", c.eca.levy_alpha},
            {"levy_scale", c.eca.levy_scale},
            {"max_cycles", c.eca.max_cycles},
            {"crossover", "uniform"},
            {"k", c.k ? json(*c.k) : json(nullptr)},
            {"runs", c.runs},
            {"seed", c.seed},
            {"sse_opt", c.sse_opt}}},
          {"records", records}};
}

// ---------------------------------------------------------------------------

double FcaReport::concept_reduction() const {
  const double o = static_cast<double>(result.original.n_concepts);
  return o == 0.0 ? 0.0 : (o - static_cast<double>(result.final.n_concepts)) / o;
}

FcaReport run_fca_suite(const FcaSuiteConfig& config) {
  return {config, reducer::reduce_context(config.context, config.taxonomy, config.params)};
}

json to_json(const fca::LatticeInvariants& inv) {
  return {{"concepts", inv.n_concepts},   {"edges", inv.n_edges},         {"height", inv.height},
          {"width_lower", inv.width_lower}, {"width_upper", inv.width_upper}, {"max_degree", inv.max_degree},
          {"mean_degree", inv.mean_degree}, {"girth", inv.girth}};
}

json to_json(const FcaReport& report) {
  const auto& c = report.config;
  const auto& r = report.result;
  json trace = json::array();
  for (const auto& e : r.trace)
    trace.push_back({{"iteration", e.iteration},
                     {"axis", reducer::to_string(e.axis)},
                     {"a", e.a},
                     {"b", e.b},
                     {"label", e.label},
                     {"kind", reducer::to_string(e.kind)}});
  return {{"kind", "fca-reduce"},
          {"config",
           {{"context", c.context_name},
            {"objects", c.context.n_objects()},
            {"attributes", c.context.n_attributes()},
            {"hypernym_depth", c.params.hypernym_depth},
            {"hyponym_depth", c.params.hyponym_depth},
            {"max_iterations", c.params.max_iterations},
            {"quality_floor", c.params.quality_floor},
            {"seed", c.seed}}},
          {"original", to_json(r.original)},
          {"reduced", to_json(r.final)},
          {"reduced_objects", r.reduced.n_objects()},
          {"reduced_attributes", r.reduced.n_attributes()},
          {"quality", r.quality},
          {"concept_reduction", report.concept_reduction()},
          {"iterations", r.iterations},
          {"stop_reason", r.stop_reason},
          {"merges", r.trace.size()},
          {"trace", trace}};
}

json lattice_json(const fca::FormalContext& ctx, const fca::ConceptLattice& lattice) {
  json concepts = json::array();
  for (const auto& c : lattice.concepts) {
    json extent = json::array(), intent = json::array();
    for (std::size_t o : fca::indices(c.extent)) extent.push_back(ctx.objects()[o]);
    for (std::size_t a : fca::indices(c.intent)) intent.push_back(ctx.attributes()[a]);
    concepts.push_back({{"extent", extent}, {"intent", intent}});
  }
  json edges = json::array();
  for (const auto& [child, parent] : lattice.edges) edges.push_back({child, parent});
  return {{"concepts", concepts}, {"edges", edges}, {"invariants", to_json(lattice.invariants)}};
}

}  // namespace evokit::experiments
