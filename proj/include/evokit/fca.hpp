#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace evokit::fca {

using Bits = boost::dynamic_bitset<>;

/// Objects x attributes with a binary incidence stored row-wise (one
/// attribute bitset per object).
class FormalContext {
 public:
  FormalContext() = default;
  FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes);

  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  std::size_t n_objects() const noexcept { return objects_.size(); }
  std::size_t n_attributes() const noexcept { return attributes_.size(); }

  bool incident(std::size_t o, std::size_t a) const { return rows_.at(o).test(a); }
  void set(std::size_t o, std::size_t a, bool value = true) { rows_.at(o).set(a, value); }
  const Bits& row(std::size_t o) const { return rows_.at(o); }
  /// Objects having attribute a.
  Bits column(std::size_t a) const;

  /// Attributes shared by every object in `extent` (all attributes for the
  /// empty set).
  Bits intent_of(const Bits& extent) const;
  /// Objects having every attribute in `intent`.
  Bits extent_of(const Bits& intent) const;

  /// Throws ErrorKind::input on duplicate labels.
  void validate() const;

  std::string name;

  bool operator==(const FormalContext&) const = default;

 private:
  std::vector<std::string> objects_;
  std::vector<std::string> attributes_;
  std::vector<Bits> rows_;
};

struct Concept {
  Bits extent;
  Bits intent;
  bool operator==(const Concept&) const = default;
};

/// All formal concepts by NextClosure, returned in canonical order: extent
/// size ascending, then extents compared as sorted index lists.
std::vector<Concept> derive_concepts(const FormalContext& ctx);

/// Covering pairs (child, parent) of the extent-inclusion order, as indices
/// into `concepts`; the child has the smaller extent. Edges are sorted.
std::vector<std::pair<std::size_t, std::size_t>> hasse_edges(const std::vector<Concept>& concepts);

struct LatticeInvariants {
  std::size_t n_concepts = 0;
  std::size_t n_edges = 0;
  /// Nodes on a longest chain.
  std::size_t height = 0;
  std::size_t width_lower = 0;
  std::size_t width_upper = 0;
  // Logged only; not part of lattice_quality.
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
  /// Shortest cycle length of the undirected Hasse graph, 0 when acyclic.
  std::size_t girth = 0;

  double width_mid() const noexcept { return 0.5 * static_cast<double>(width_lower + width_upper); }
};

/// Lattices up to this size get an exact width via a minimum chain cover.
inline constexpr std::size_t kExactWidthLimit = 512;

struct ConceptLattice {
  std::vector<Concept> concepts;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  LatticeInvariants invariants;
};

LatticeInvariants invariants(const std::vector<Concept>& concepts,
                             const std::vector<std::pair<std::size_t, std::size_t>>& edges);

ConceptLattice build_lattice(const FormalContext& ctx);

/// Mean of min/max ratios of concept count, edge count, height and width
/// midpoint. A ratio of two zeros counts as 1.
double lattice_quality(const LatticeInvariants& original, const LatticeInvariants& reduced);

/// Burmeister format: "B", name line, |O|, |A|, blank line, object labels,
/// attribute labels, then one row of '.'/'X' per object.
void write_cxt(std::ostream& out, const FormalContext& ctx);
FormalContext read_cxt(std::istream& in);

/// Sorted member indices of a bitset.
std::vector<std::size_t> indices(const Bits& bits);

}  // namespace evokit::fca
