#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evokit/errors.hpp"
#include "evokit/experiments.hpp"
#include "evokit/io.hpp"
#include "synthetic.hpp"

using namespace evokit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("evokit_io_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

void expect_parse_error(const std::string& text, const std::string& fragment) {
  std::istringstream in(text);
  try {
    io::read_points(in, "pts.txt");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    return;
  }
  FAIL("accepted: " << text);
}

}  // namespace

TEST_CASE("read_points") {
  std::istringstream two("0 0\n1 1\n");
  const Matrix m = io::read_points(two);
  CHECK(m == Matrix::from_rows({{0, 0}, {1, 1}}));

  std::istringstream spaced("  1.5\t-2e3 \r\n\n3 +4\n");
  CHECK(io::read_points(spaced) == Matrix::from_rows({{1.5, -2000}, {3, 4}}));

  expect_parse_error("1 2\n3\n", "pts.txt:2");
  expect_parse_error("1 2\n3 4 5\n", "pts.txt:2");
  expect_parse_error("1 2\n3 x\n", "pts.txt:2");
  expect_parse_error("1 2\n\n3 4z\n", "pts.txt:3");

  std::istringstream empty("");
  CHECK_THROWS_AS(io::read_points(empty), Error);
  std::istringstream blank("\n \n");
  try {
    io::read_points(blank);
    FAIL("blank file accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::input);
  }
}

TEST_CASE("files") {
  TempDir tmp;
  io::write_text(tmp.path / "a" / "pts.txt", "0 0\n1 1\n");
  io::write_text(tmp.path / "gt.txt", "0.5 0.5\n");
  const auto d = io::load_dataset(tmp.path / "a" / "pts.txt", tmp.path / "gt.txt");
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  REQUIRE(d.ground_truth_centroids);
  CHECK(d.ground_truth_centroids->rows() == 1);

  io::write_text(tmp.path / "gt3.txt", "0 0 0\n");
  CHECK_THROWS_AS(io::load_dataset(tmp.path / "a" / "pts.txt", tmp.path / "gt3.txt"), Error);
  io::write_text(tmp.path / "empty.txt", "");
  CHECK_THROWS_AS(io::load_dataset(tmp.path / "empty.txt"), Error);
  try {
    io::load_points(tmp.path / "missing.txt");
    FAIL("missing file accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }

  std::mt19937_64 gen(61);
  auto ctx = synth::random_context(gen, 5, 4, 0.5);
  ctx.name = "demo";
  io::save_context(tmp.path / "c.cxt", ctx);
  CHECK(io::load_context(tmp.path / "c.cxt") == ctx);

  io::write_text(tmp.path / "tax.tsv", "cat\tmammal\ndog\tmammal\n");
  const auto tax = io::load_taxonomy(tmp.path / "tax.tsv");
  CHECK(reducer::classify_pair("cat", "dog", tax, {}) == reducer::PairKind::related);
  CHECK(io::read_text(tmp.path / "tax.tsv") == "cat\tmammal\ndog\tmammal\n");
}

TEST_CASE("number formatting") {
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(1.092e5, 4) == "1.092e+05");
  CHECK(io::format_number(2.0, 4) == "2.000e+00");
  CHECK(io::parse_number("+1.5") == 1.5);
  CHECK(!io::parse_number("1.5x"));
  CHECK(!io::parse_number(""));

  std::mt19937_64 gen(62);
  for (int t = 0; t < 100000; ++t) {
    double v;
    const std::uint64_t bits = gen();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto back = io::parse_number(io::format_number(v));
    REQUIRE(back);
    CHECK(*back == v);
  }
}

TEST_CASE("default output dir") {
  ::setenv("EVOKIT_OUT_DIR", "/tmp/evokit-out", 1);
  CHECK(io::default_output_dir() == fs::path("/tmp/evokit-out"));
  ::setenv("EVOKIT_OUT_DIR", "", 1);
  CHECK(io::default_output_dir() == fs::current_path());
  ::unsetenv("EVOKIT_OUT_DIR");
  CHECK(io::default_output_dir() == fs::current_path());
}

TEST_CASE("bench suite reports") {
  experiments::BenchSuiteConfig cfg;
  cfg.algorithms = {optimizers::Algorithm::bsa, optimizers::Algorithm::de};
  cfg.cases = {{"F14", 2, optimizers::SearchRange::r1}, {"F11", 2, optimizers::SearchRange::r1}};
  cfg.optimizer.runs = 4;
  cfg.optimizer.max_iterations = 300;
  cfg.seed = 9;
  cfg.threads = 2;
  const auto report = experiments::run_bench_suite(cfg);
  CHECK(report.records.size() == 4);

  SUBCASE("one function, one algorithm, one run") {
    auto single = cfg;
    single.algorithms = {optimizers::Algorithm::bsa};
    single.cases.resize(1);
    single.optimizer.runs = 1;
    const auto r = experiments::run_bench_suite(single);
    CHECK(csv_rows(experiments::bench_stats_csv(r)).size() == 2);
  }

  SUBCASE("stats CSV re-parses exactly") {
    const auto rows = csv_rows(experiments::bench_stats_csv(report));
    REQUIRE(rows.size() == report.records.size() + 1);
    CHECK(rows[0][5] == "mean");
    for (std::size_t i = 0; i < report.records.size(); ++i) {
      const auto& s = report.records[i].summary;
      const auto& row = rows[i + 1];
      CHECK(row[0] == report.records[i].bench.function_id);
      if (s.mean) {
        CHECK(*io::parse_number(row[5]) == *s.mean);
        CHECK(*io::parse_number(row[6]) == *s.sd);
        CHECK(*io::parse_number(row[7]) == *s.best);
        CHECK(*io::parse_number(row[8]) == *s.worst);
      }
      CHECK(*io::parse_number(row[10]) == static_cast<double>(s.n_success));
    }
  }

  SUBCASE("wilcoxon and ratio tables") {
    const auto w = experiments::compare(report, optimizers::Algorithm::bsa, optimizers::Algorithm::de,
                                        stats::Metric::iterations, 0.05);
    CHECK(w.size() == 2);
    const auto rows = csv_rows(experiments::wilcoxon_csv(w));
    CHECK(rows[0] == std::vector<std::string>{"function", "dim", "range", "p_value", "r_plus", "r_minus",
                                              "n_effective", "exact", "win"});
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(*io::parse_number(rows[i + 1][3]) == w[i].result.p_value);
      const double n = static_cast<double>(w[i].result.n_effective);
      CHECK(w[i].result.r_plus + w[i].result.r_minus == n * (n + 1) / 2);
    }
    const auto ratios = experiments::success_ratios(report);
    CHECK(ratios.size() == 2);
    for (const auto& r : ratios) {
      CHECK(r.configuration == "R1");
      CHECK(r.ratio.success + r.ratio.failure == 2);
    }
  }

  SUBCASE("json round trip") {
    const auto j = experiments::to_json(report);
    CHECK(j.at("kind") == "bench-opt");
    const auto text = j.dump(2);
    const auto back = experiments::bench_report_from_json(experiments::json::parse(text));
    CHECK(back.records.size() == report.records.size());
    CHECK(experiments::to_json(back).dump(2) == text);
    CHECK(experiments::bench_stats_csv(back).size() > 0);
    CHECK(text.find("wall_time") == std::string::npos);
  }

  SUBCASE("determinism across thread counts") {
    auto serial = cfg;
    serial.threads = 1;
    CHECK(experiments::to_json(experiments::run_bench_suite(serial)).dump() == experiments::to_json(report).dump());
  }
}

TEST_CASE("cluster suite reports") {
  experiments::ClusterSuiteConfig cfg;
  cfg.datasets = {{"blobs", synth::four_blobs(1)}};
  cfg.algorithms = {experiments::ClusterAlgorithm::eca_star, experiments::ClusterAlgorithm::kmeans_pp};
  cfg.runs = 1;
  cfg.seed = 3;
  const auto one = experiments::run_cluster_suite(cfg);
  REQUIRE(one.records.size() == 2);
  for (const auto& rec : one.records) {
    REQUIRE(rec.runs.size() == 1);
    CHECK(rec.mean.sse == rec.runs[0].quality.sse);
    CHECK(*rec.mean.ci == *rec.runs[0].quality.ci);
  }
  const auto rows = csv_rows(experiments::cluster_csv(one));
  CHECK(rows[0] == std::vector<std::string>{"dataset", "algorithm", "runs", "ci", "csi", "nmi", "sse", "nmse",
                                            "eps_ratio"});
  CHECK(rows[1][1] == "eca-star");
  CHECK(*io::parse_number(rows[1][6]) == one.records[0].mean.sse);

  auto bare = cfg;
  bare.datasets[0].data.ground_truth_centroids.reset();
  bare.datasets[0].data.labels.reset();
  bare.algorithms = {experiments::ClusterAlgorithm::eca_star};
  const auto internal = experiments::run_cluster_suite(bare);
  CHECK(!internal.records[0].mean.ci);
  const auto irows = csv_rows(experiments::cluster_csv(internal));
  CHECK(irows[1][3].empty());
  CHECK(irows[1][4].empty());

  // K-means needs a K from somewhere.
  bare.algorithms = {experiments::ClusterAlgorithm::kmeans};
  CHECK_THROWS_AS(experiments::run_cluster_suite(bare), Error);
  bare.k = 4;
  CHECK_NOTHROW(experiments::run_cluster_suite(bare));

  const auto j = experiments::to_json(one);
  CHECK(experiments::json::parse(j.dump()) == j);
  CHECK(experiments::parse_cluster_algorithm("km++") == experiments::ClusterAlgorithm::kmeans_pp);
  CHECK_THROWS_AS(experiments::parse_cluster_algorithm("em"), Error);
}

TEST_CASE("fca suite report") {
  std::mt19937_64 gen(63);
  experiments::FcaSuiteConfig cfg;
  cfg.context_name = "random";
  cfg.context = synth::random_context(gen, 6, 5, 0.4);
  const auto identity = experiments::run_fca_suite(cfg);
  CHECK(identity.result.quality == 1.0);
  CHECK(identity.result.trace.empty());
  CHECK(identity.concept_reduction() == 0.0);

  const auto corpus = synth::planted_corpus(5, {30, 20, 0.2, 0.2, 0.05});
  cfg.context = corpus.context;
  cfg.taxonomy = corpus.taxonomy;
  const auto planted = experiments::run_fca_suite(cfg);
  const auto j = experiments::to_json(planted);
  const auto back = experiments::json::parse(j.dump(2));
  CHECK(back == j);
  CHECK(back.at("merges") == planted.result.trace.size());
  CHECK(back.at("original").at("concepts") == planted.result.original.n_concepts);
  CHECK(back.at("quality").get<double>() == planted.result.quality);
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(100, 0);
  experiments::parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(experiments::parallel_for(10, 2,
                                            [](std::size_t i) {
                                              if (i == 7) throw Error(ErrorKind::input, "boom");
                                            }),
                  Error);
}
