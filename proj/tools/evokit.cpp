#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "evokit/benchfns.hpp"
#include "evokit/errors.hpp"
#include "evokit/experiments.hpp"
#include "evokit/io.hpp"

namespace fs = std::filesystem;
using namespace evokit;
using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

fs::path resolve_out(const std::string& given, const std::string& fallback) {
  if (!given.empty()) return given;
  return io::default_output_dir() / fallback;
}

std::optional<int> digits_opt(int digits) {
  if (digits < 0) return std::nullopt;
  if (digits < 1 || digits > 17) throw Error(ErrorKind::parameter, "--digits must lie in [1, 17]");
  return digits;
}

void write_json(const fs::path& path, const json& j) { io::write_text(path, j.dump(2) + "\n"); }

struct BenchOptions {
  bool list = false;
  std::string algos = "bsa";
  std::string fns = "all";
  std::vector<std::size_t> dims{2};
  std::vector<std::string> ranges{"default"};
  std::string test;
  optimizers::OptimizerConfig opt;
  bool no_early_stop = false;
  std::string metric = "iters";
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string out, json_out;
  int digits = -1;
};

void run_bench(const BenchOptions& o) {
  if (o.list) {
    std::cout << "id,name,low,up,dim_rule,global_min,hardness\n";
    for (const auto& fn : benchfns::catalog())
      std::cout << fn.id << ',' << fn.name << ',' << io::format_number(fn.low) << ',' << io::format_number(fn.up)
                << ',' << benchfns::to_string(fn.dimension_rule) << ',' << io::format_number(fn.global_min) << ','
                << io::format_number(fn.hardness_pct) << '\n';
    return;
  }
  experiments::BenchSuiteConfig cfg;
  const std::vector<std::string> names =
      o.algos == "all" ? std::vector<std::string>{"bsa", "de", "pso", "abc", "ff"} : split_list(o.algos);
  for (const auto& a : names) cfg.algorithms.push_back(optimizers::parse_algorithm(a));

  if (o.test == "dim") {
    cfg.cases = experiments::dimension_sweep();
  } else if (o.test == "range") {
    cfg.cases = experiments::range_sweep();
  } else if (!o.test.empty()) {
    throw Error(ErrorKind::parameter, "--test must be 'dim' or 'range'");
  } else {
    std::vector<std::string> fns;
    if (o.fns == "all")
      for (const auto& fn : benchfns::catalog()) fns.emplace_back(fn.id);
    else
      fns = split_list(o.fns);
    for (const auto& r : o.ranges)
      for (std::size_t d : o.dims)
        for (const auto& f : fns) {
          const auto& fn = benchfns::lookup(f);
          const std::size_t dim = fn.dimension_rule == benchfns::DimensionRule::scalable ? d : 2;
          experiments::BenchCase c{std::string(fn.id), dim, optimizers::parse_range(r)};
          const bool dup = std::any_of(cfg.cases.begin(), cfg.cases.end(), [&](const auto& x) {
            return x.function_id == c.function_id && x.dim == c.dim && x.range == c.range;
          });
          if (!dup) cfg.cases.push_back(c);
        }
  }
  cfg.optimizer = o.opt;
  cfg.optimizer.stop_on_success = !o.no_early_stop;
  cfg.metric = stats::parse_metric(o.metric);
  cfg.seed = o.seed;
  cfg.threads = o.threads;

  const auto report = experiments::run_bench_suite(cfg);
  const auto digits = digits_opt(o.digits);
  io::write_text(resolve_out(o.out, "bench.csv"), experiments::bench_stats_csv(report, digits));
  write_json(resolve_out(o.json_out, "bench.json"), experiments::to_json(report));
}

struct ClusterOptions {
  std::string algos = "eca-star";
  std::vector<std::string> data, gt;
  std::size_t k = 0;
  eca::EcaParams eca;
  std::size_t runs = 30;
  std::uint64_t seed = 0;
  double sse_opt = metrics::kDefaultSseOpt;
  std::size_t threads = 0;
  std::string out, json_out;
  int digits = -1;
};

void run_cluster(const ClusterOptions& o) {
  if (!o.gt.empty() && o.gt.size() != o.data.size())
    throw Error(ErrorKind::parameter, "give one --gt file per --data file, or none");
  experiments::ClusterSuiteConfig cfg;
  for (std::size_t i = 0; i < o.data.size(); ++i) {
    std::optional<fs::path> gt;
    if (!o.gt.empty()) gt = o.gt[i];
    cfg.datasets.push_back({fs::path(o.data[i]).filename().string(), io::load_dataset(o.data[i], gt)});
  }
  for (const auto& a : split_list(o.algos)) cfg.algorithms.push_back(experiments::parse_cluster_algorithm(a));
  cfg.eca = o.eca;
  if (o.k > 0) cfg.k = o.k;
  cfg.runs = o.runs;
  cfg.seed = o.seed;
  cfg.sse_opt = o.sse_opt;
  cfg.threads = o.threads;
  metrics::eps_ratio(0.0, cfg.sse_opt);  // validates sse_opt before any run

  const auto report = experiments::run_cluster_suite(cfg);
  io::write_text(resolve_out(o.out, "cluster.csv"), experiments::cluster_csv(report, digits_opt(o.digits)));
  write_json(resolve_out(o.json_out, "cluster.json"), experiments::to_json(report));
}

struct FcaOptions {
  std::string ctx, tax;
  reducer::ReduceParams params;
  std::uint64_t seed = 0;
  std::string out, report, lattice;
};

void run_fca(const FcaOptions& o) {
  experiments::FcaSuiteConfig cfg;
  cfg.context_name = fs::path(o.ctx).filename().string();
  cfg.context = io::load_context(o.ctx);
  cfg.taxonomy = io::load_taxonomy(o.tax);
  cfg.params = o.params;
  cfg.seed = o.seed;
  const auto report = experiments::run_fca_suite(cfg);
  io::save_context(resolve_out(o.out, "reduced.cxt"), report.result.reduced);
  write_json(resolve_out(o.report, "invariants.json"), experiments::to_json(report));
  if (!o.lattice.empty())
    write_json(o.lattice, experiments::lattice_json(report.result.reduced, fca::build_lattice(report.result.reduced)));
}

struct ReportOptions {
  std::string runs;
  std::string compare = "bsa,de";
  std::string metric = "iters";
  double alpha = 0.05;
  std::string out, ratios, json_out;
  int digits = -1;
};

void run_report(const ReportOptions& o) {
  const auto report = experiments::bench_report_from_json(json::parse(io::read_text(o.runs), nullptr, true));
  const auto pair = split_list(o.compare);
  if (pair.size() != 2) throw Error(ErrorKind::parameter, "--compare takes exactly two algorithms, e.g. bsa,de");
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw Error(ErrorKind::parameter, "--alpha must lie in (0, 1)");
  const auto a = optimizers::parse_algorithm(pair[0]);
  const auto b = optimizers::parse_algorithm(pair[1]);
  const auto metric = stats::parse_metric(o.metric);
  const auto rows = experiments::compare(report, a, b, metric, o.alpha);
  io::write_text(resolve_out(o.out, "wilcoxon.csv"), experiments::wilcoxon_csv(rows, digits_opt(o.digits)));
  io::write_text(resolve_out(o.ratios, "ratios.csv"), experiments::ratios_csv(experiments::success_ratios(report)));

  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"function", r.bench.function_id},
                     {"dim", r.bench.dim},
                     {"range", optimizers::to_string(r.bench.range)},
                     {"p_value", r.result.p_value},
                     {"r_plus", r.result.r_plus},
                     {"r_minus", r.result.r_minus},
                     {"n_effective", r.result.n_effective},
                     {"exact", r.result.exact},
                     {"win", stats::to_string(r.result.winner)}});
  write_json(resolve_out(o.json_out, "wilcoxon.json"),
             {{"kind", "report"},
              {"config", {{"runs", o.runs}, {"compare", pair}, {"metric", stats::to_string(metric)}, {"alpha", o.alpha}}},
              {"rows", jrows}});
}

int fail(std::string_view kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evokit: backtracking search benchmarks, ECA* clustering and formal context reduction"};
  app.require_subcommand(1);

  BenchOptions bo;
  auto* bench = app.add_subcommand("bench-opt", "Run optimisers on the benchmark functions");
  bench->add_flag("--list", bo.list, "Print the function catalog as CSV and exit");
  bench->add_option("--algo", bo.algos, "bsa, de, pso, abc, ff, comma list or 'all'");
  bench->add_option("--fn", bo.fns, "Function ids or names, comma list or 'all'");
  bench->add_option("--dim", bo.dims, "Dimensions for scalable functions")->expected(1, -1);
  bench->add_option("--range", bo.ranges, "default, R1, R2, R3")->expected(1, -1);
  bench->add_option("--test", bo.test, "Preset sweep: 'dim' (10/30/60, catalog space) or 'range' (D=2, R1-R3)");
  bench->add_option("--runs", bo.opt.runs);
  bench->add_option("--iters", bo.opt.max_iterations);
  bench->add_option("--pop", bo.opt.population_size);
  bench->add_option("--tol", bo.opt.success_tolerance, "Success tolerance on |f - f*|");
  bench->add_option("--mixrate", bo.opt.mixrate);
  bench->add_flag("--no-early-stop", bo.no_early_stop, "Keep iterating after reaching the target");
  bench->add_option("--metric", bo.metric, "iters or value");
  bench->add_option("--seed", bo.seed);
  bench->add_option("--threads", bo.threads, "0 = all cores");
  bench->add_option("--out", bo.out, "Statistics CSV");
  bench->add_option("--json", bo.json_out, "Machine JSON with every run");
  bench->add_option("--digits", bo.digits, "Significant digits for the CSV (default: exact)");

  ClusterOptions co;
  auto* cluster = app.add_subcommand("cluster", "Cluster datasets with ECA* or K-means");
  cluster->add_option("--algo", co.algos, "eca-star, km, km++ (comma list)");
  cluster->add_option("--data", co.data, "Point files")->required()->expected(1, -1);
  cluster->add_option("--gt", co.gt, "Ground-truth centroid files")->expected(1, -1);
  cluster->add_option("--k", co.k, "Clusters for K-means (default: ground-truth count)");
  cluster->add_option("--ranks", co.eca.social_ranks, "Social class ranks S");
  cluster->add_option("--density", co.eca.density_threshold, "Cluster density threshold");
  cluster->add_option("--cycles", co.eca.max_cycles);
  cluster->add_option("--levy-alpha", co.eca.levy_alpha);
  cluster->add_option("--levy-scale", co.eca.levy_scale);
  cluster->add_option("--runs", co.runs);
  cluster->add_option("--seed", co.seed);
  cluster->add_option("--sse-opt", co.sse_opt);
  cluster->add_option("--threads", co.threads, "0 = all cores");
  cluster->add_option("--out", co.out, "Quality CSV");
  cluster->add_option("--json", co.json_out, "Machine JSON with every run");
  cluster->add_option("--digits", co.digits, "Significant digits for the CSV (default: exact)");

  FcaOptions fo;
  auto* fcar = app.add_subcommand("fca-reduce", "Reduce a formal context with a lexical taxonomy");
  fcar->add_option("--ctx", fo.ctx, "Burmeister .cxt context")->required();
  fcar->add_option("--tax", fo.tax, "Taxonomy TSV")->required();
  fcar->add_option("--hyper-depth", fo.params.hypernym_depth);
  fcar->add_option("--hypo-depth", fo.params.hyponym_depth);
  fcar->add_option("--iters", fo.params.max_iterations);
  fcar->add_option("--floor", fo.params.quality_floor, "Minimum lattice quality");
  fcar->add_option("--seed", fo.seed);
  fcar->add_option("--out", fo.out, "Reduced context (.cxt)");
  fcar->add_option("--report", fo.report, "Invariants JSON");
  fcar->add_option("--lattice", fo.lattice, "Reduced lattice JSON (concepts, edges, invariants)");

  ReportOptions ro;
  auto* rep = app.add_subcommand("report", "Wilcoxon comparison and success ratios from a bench-opt JSON");
  rep->add_option("--runs", ro.runs, "bench-opt machine JSON")->required();
  rep->add_option("--compare", ro.compare, "Two algorithms, e.g. bsa,de");
  rep->add_option("--metric", ro.metric, "iters or value");
  rep->add_option("--alpha", ro.alpha);
  rep->add_option("--out", ro.out, "Wilcoxon CSV");
  rep->add_option("--ratios", ro.ratios, "Success ratio CSV");
  rep->add_option("--json", ro.json_out, "Wilcoxon JSON");
  rep->add_option("--digits", ro.digits, "Significant digits for the CSV (default: exact)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*bench) run_bench(bo);
    else if (*cluster) run_cluster(co);
    else if (*fcar) run_fca(fo);
    else if (*rep) run_report(ro);
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what());
  } catch (const json::exception& e) {
    return fail("parse", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
