#include "evokit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evokit/errors.hpp"

namespace evokit::io {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

std::optional<double> parse_number(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  return v;
}

Matrix read_points(std::istream& in, const std::string& source) {
  Matrix out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    row.clear();
    while (fields >> token) {
      const auto v = parse_number(token);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorKind::parse, source + ":" + std::to_string(line_no) + ": non-numeric token '" + token + "'");
      row.push_back(*v);
    }
    if (row.empty()) continue;
    if (dim == 0) {
      dim = row.size();
      out = Matrix(0, dim);
    } else if (row.size() != dim) {
      throw Error(ErrorKind::parse, source + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                        " values, found " + std::to_string(row.size()));
    }
    out.append_row(row);
  }
  if (dim == 0) throw Error(ErrorKind::input, source + ": no data points");
  return out;
}

Matrix load_points(const fs::path& path) {
  auto in = open_in(path);
  return read_points(in, path.string());
}

clustering::Dataset load_dataset(const fs::path& path, const std::optional<fs::path>& ground_truth) {
  clustering::Dataset data;
  data.points = load_points(path);
  if (ground_truth) data.ground_truth_centroids = load_points(*ground_truth);
  data.validate();
  return data;
}

fca::FormalContext load_context(const fs::path& path) {
  auto in = open_in(path);
  return fca::read_cxt(in);
}

void save_context(const fs::path& path, const fca::FormalContext& ctx) {
  std::ostringstream out;
  fca::write_cxt(out, ctx);
  write_text(path, out.str());
}

reducer::Taxonomy load_taxonomy(const fs::path& path) {
  auto in = open_in(path);
  return reducer::read_taxonomy(in);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::io, "cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::io, "write to '" + path.string() + "' failed");
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double v, std::optional<int> digits) {
  char buf[64];
  const auto res = digits ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, *digits - 1)
                          : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

fs::path default_output_dir() {
  const char* env = std::getenv("EVOKIT_OUT_DIR");
  if (env && *env) return fs::path(env);
  return fs::current_path();
}

}  // namespace evokit::io
