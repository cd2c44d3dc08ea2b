#include "evokit/benchfns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "evokit/errors.hpp"

namespace evokit::benchfns {
namespace {

using std::numbers::pi;

constexpr double kSchwefelConstant = 418.98288727243374;
constexpr double kStyblinskiTangPerDim = -39.16616570377142;

constexpr std::array<BenchmarkFunction, 16> kCatalog{{
    {1, "F1", "Ackley", -32.0, 32.0, DimensionRule::scalable, 0.0, 48.25},
    {2, "F2", "Alpine01", 0.0, 10.0, DimensionRule::fixed_two, 0.0, 65.17},
    {3, "F3", "Bird", -2.0 * pi, 2.0 * pi, DimensionRule::fixed_two, -106.76453, 59.00},
    {4, "F4", "Leon", 0.0, 10.0, DimensionRule::fixed_two, 0.0, 41.17},
    {5, "F5", "CrossInTray", -10.0, 10.0, DimensionRule::fixed_two, -2.062611, 74.08},
    {6, "F6", "Easom", -100.0, 100.0, DimensionRule::fixed_two, -1.0, 26.08},
    {7, "F7", "Whitley", -10.24, 10.24, DimensionRule::fixed_two, 0.0, 4.92},
    {8, "F8", "EggCrate", -5.0, 5.0, DimensionRule::fixed_two, 0.0, 64.92},
    {9, "F9", "Griewank", -600.0, 600.0, DimensionRule::scalable, 0.0, 6.08},
    {10, "F10", "HolderTable", -10.0, 10.0, DimensionRule::fixed_two, -19.2085, 80.08},
    {11, "F11", "Rastrigin", -5.12, 5.12, DimensionRule::scalable, 0.0, 39.50},
    {12, "F12", "Rosenbrock", -5.0, 10.0, DimensionRule::scalable, 0.0, 44.17},
    {13, "F13", "Salomon", -100.0, 100.0, DimensionRule::fixed_two, 0.0, 10.33},
    {14, "F14", "Sphere", -1.0, 1.0, DimensionRule::fixed_two, 0.0, 82.75},
    {15, "F15", "StyblinskiTang", -5.0, 5.0, DimensionRule::scalable, -39.1661, 70.50},
    {16, "F16", "Schwefel26", -500.0, 500.0, DimensionRule::fixed_two, 0.0, 62.67},
}};

std::string lowered(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double sum_squares(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double ackley(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double cos_sum = 0.0;
  for (double v : x) cos_sum += std::cos(2.0 * pi * v);
  return -20.0 * std::exp(-0.2 * std::sqrt(sum_squares(x) / n)) - std::exp(cos_sum / n) + 20.0 +
         std::numbers::e;
}

double alpine01(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v * std::sin(v) + 0.1 * v);
  return s;
}

double bird(double x, double y) {
  return std::sin(x) * std::exp(std::pow(1.0 - std::cos(y), 2)) +
         std::cos(y) * std::exp(std::pow(1.0 - std::sin(x), 2)) + (x - y) * (x - y);
}

double leon(double x, double y) {
  const double a = y - x * x * x;
  return 100.0 * a * a + (1.0 - x) * (1.0 - x);
}

double cross_in_tray(double x, double y) {
  const double r = std::sqrt(x * x + y * y);
  const double inner = std::abs(std::sin(x) * std::sin(y) * std::exp(std::abs(100.0 - r / pi)));
  return -0.0001 * std::pow(inner + 1.0, 0.1);
}

double easom(double x, double y) {
  return -std::cos(x) * std::cos(y) *
         std::exp(-((x - pi) * (x - pi)) - ((y - pi) * (y - pi)));
}

double whitley(std::span<const double> x) {
  double s = 0.0;
  for (double xi : x) {
    for (double xj : x) {
      const double a = xi * xi - xj;
      const double t = 100.0 * a * a + (1.0 - xj) * (1.0 - xj);
      s += t * t / 4000.0 - std::cos(t) + 1.0;
    }
  }
  return s;
}

double egg_crate(double x, double y) {
  const double sx = std::sin(x), sy = std::sin(y);
  return x * x + y * y + 25.0 * (sx * sx + sy * sy);
}

double griewank(std::span<const double> x) {
  double prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  return 1.0 + sum_squares(x) / 4000.0 - prod;
}

double holder_table(double x, double y) {
  const double r = std::sqrt(x * x + y * y);
  return -std::abs(std::sin(x) * std::cos(y) * std::exp(std::abs(1.0 - r / pi)));
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
  return s;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    s += 100.0 * a * a + (1.0 - x[i]) * (1.0 - x[i]);
  }
  return s;
}

double salomon(std::span<const double> x) {
  const double r = std::sqrt(sum_squares(x));
  return 1.0 - std::cos(2.0 * pi * r) + 0.1 * r;
}

double styblinski_tang(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v * v * v - 16.0 * v * v + 5.0 * v;
  return 0.5 * s;
}

double schwefel26(std::span<const double> x) {
  double s = kSchwefelConstant * static_cast<double>(x.size());
  for (double v : x) s -= v * std::sin(std::sqrt(std::abs(v)));
  return s;
}

}  // namespace

std::string_view to_string(DimensionRule rule) {
  return rule == DimensionRule::scalable ? "n" : "2";
}

const std::array<BenchmarkFunction, 16>& catalog() { return kCatalog; }

const BenchmarkFunction& lookup(std::string_view id_or_name) {
  const std::string key = lowered(id_or_name);
  for (const auto& fn : kCatalog)
    if (lowered(fn.id) == key || lowered(fn.name) == key) return fn;
  throw Error(ErrorKind::parameter, "unknown benchmark function '" + std::string(id_or_name) + "'");
}

const BenchmarkFunction& metadata(std::string_view id_or_name) { return lookup(id_or_name); }

double evaluate(const BenchmarkFunction& fn, std::span<const double> x) {
  if (!fn.accepts_dimension(x.size())) {
    std::ostringstream msg;
    msg << fn.name << " does not accept dimension " << x.size();
    throw Error(ErrorKind::shape, msg.str());
  }
  for (double v : x)
    if (!std::isfinite(v)) throw Error(ErrorKind::input, "non-finite coordinate passed to " + std::string(fn.name));

  switch (fn.index) {
    case 1: return ackley(x);
    case 2: return alpine01(x);
    case 3: return bird(x[0], x[1]);
    case 4: return leon(x[0], x[1]);
    case 5: return cross_in_tray(x[0], x[1]);
    case 6: return easom(x[0], x[1]);
    case 7: return whitley(x);
    case 8: return egg_crate(x[0], x[1]);
    case 9: return griewank(x);
    case 10: return holder_table(x[0], x[1]);
    case 11: return rastrigin(x);
    case 12: return rosenbrock(x);
    case 13: return salomon(x);
    case 14: return sum_squares(x);
    case 15: return styblinski_tang(x);
    case 16: return schwefel26(x);
  }
  throw Error(ErrorKind::parameter, "corrupt catalog entry");
}

double exact_minimum(const BenchmarkFunction& fn, std::size_t dim) {
  switch (fn.index) {
    case 3: return -106.76453674926474;
    case 5: return -2.0626118708227397;
    case 10: return -19.208502567886754;
    case 15: return kStyblinskiTangPerDim * static_cast<double>(dim);
    default: return fn.global_min;
  }
}

}  // namespace evokit::benchfns
