#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace evokit::benchfns {

enum class DimensionRule { fixed_two, scalable };

std::string_view to_string(DimensionRule rule);

/// One row of the benchmark catalog. `global_min` and `hardness_pct` are the
/// published catalog values; `exact_minimum` below gives the refined value
/// used for success checks.
struct BenchmarkFunction {
  int index;               // 1..16
  std::string_view id;     // "F1".."F16"
  std::string_view name;
  double low;
  double up;
  DimensionRule dimension_rule;
  double global_min;
  double hardness_pct;

  bool accepts_dimension(std::size_t dim) const {
    return dimension_rule == DimensionRule::scalable ? dim >= 1 : dim == 2;
  }
};

const std::array<BenchmarkFunction, 16>& catalog();

/// Lookup by id ("F7", case-insensitive) or by name ("Whitley").
/// Throws ErrorKind::parameter for unknown ids.
const BenchmarkFunction& lookup(std::string_view id_or_name);

/// Catalog row; identical to `fn` itself but spelled out for callers that
/// only hold an id.
const BenchmarkFunction& metadata(std::string_view id_or_name);

/// Objective value at `x`. Throws ErrorKind::shape when the dimension
/// violates the function's rule and ErrorKind::input for non-finite input.
double evaluate(const BenchmarkFunction& fn, std::span<const double> x);

/// Global minimum value at dimension `dim`, to the precision of the
/// function's known minimiser. Differs from the catalog's rounded
/// `global_min` for Bird, CrossInTray, HolderTable and StyblinskiTang
/// (which scales with dim).
double exact_minimum(const BenchmarkFunction& fn, std::size_t dim);

}  // namespace evokit::benchfns
