#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "evokit/fca.hpp"

namespace evokit::reducer {

using fca::FormalContext;

/// Lexical taxonomy: hypernym edges plus synonym groups.
class Taxonomy {
 public:
  void add_parent(const std::string& child, const std::string& parent);
  /// Terms of one synonym line; groups sharing a term are united.
  void add_synonyms(const std::vector<std::string>& terms);

  bool synonyms(const std::string& a, const std::string& b) const;
  /// Synset id of a term, or none.
  std::optional<std::size_t> synset_id(const std::string& term) const;
  /// Upward BFS distances from `term` (0 for the term and its synonyms),
  /// limited to `max_depth` steps. Ancestors of synonyms count as ancestors.
  std::map<std::string, std::size_t> ancestors(const std::string& term, std::size_t max_depth) const;
  const std::map<std::string, std::set<std::string>>& parents() const noexcept { return parents_; }

  /// Throws ErrorKind::input naming a term on a cycle.
  void check_acyclic() const;
  bool empty() const noexcept { return parents_.empty() && synset_of_.empty(); }

 private:
  std::vector<std::string> synonyms_of(const std::string& term) const;

  std::map<std::string, std::set<std::string>> parents_;
  std::map<std::string, std::size_t> synset_of_;
  std::vector<std::size_t> synset_parent_;  // union-find over synset ids
  std::size_t find(std::size_t s) const;
};

/// TSV lines: `child<TAB>parent` or `syn<TAB>term1<TAB>term2...`. Blank lines
/// and lines starting with '#' are skipped. Throws ErrorKind::parse with the
/// line number for malformed lines and ErrorKind::input for cycles.
Taxonomy read_taxonomy(std::istream& in);

struct ReduceParams {
  std::size_t hypernym_depth = 4;
  std::size_t hyponym_depth = 4;
  std::size_t max_iterations = 30;
  double quality_floor = 0.8;

  /// Throws ErrorKind::parameter.
  void validate() const;
};

enum class PairKind { similar, related, unrelated };
enum class Axis { object, attribute };

std::string_view to_string(PairKind k);
std::string_view to_string(Axis a);

/// All (i, j) with i < j, i-major.
std::vector<std::pair<std::size_t, std::size_t>> enumerate_pairs(std::size_t n);
std::vector<std::pair<std::size_t, std::size_t>> enumerate_pairs(const std::vector<std::string>& labels);

PairKind classify_pair(const std::string& a, const std::string& b, const Taxonomy& tax,
                       const ReduceParams& params);

/// The label a pair merges under: the lowest common hypernym (smallest larger
/// distance, then smallest total distance, then name). Similar pairs only
/// consider proper hypernyms and fall back to the smaller of the two labels.
/// Empty for unrelated pairs.
std::string merge_label(const std::string& a, const std::string& b, const Taxonomy& tax,
                        const ReduceParams& params);

/// Replaces lines i and j of `axis` by one line labelled `new_label` at
/// position min(i, j), carrying the OR of both. Throws ErrorKind::parameter
/// for bad indices and ErrorKind::input when the label clashes with another
/// line.
FormalContext merge_pair(const FormalContext& ctx, Axis axis, std::size_t i, std::size_t j,
                         const std::string& new_label);

struct MergeEvent {
  std::size_t iteration = 0;
  Axis axis = Axis::object;
  std::string a;
  std::string b;
  std::string label;
  PairKind kind = PairKind::similar;
};

struct ReduceResult {
  FormalContext reduced;
  std::vector<MergeEvent> trace;
  std::size_t iterations = 0;  // iterations started, including a final undone or empty one
  std::string stop_reason;
  fca::LatticeInvariants original;
  fca::LatticeInvariants final;
  double quality = 1.0;
};

/// Iterates attribute-pair then object-pair scans, merging similar and related
/// pairs. An iteration whose lattice quality falls below the floor is undone
/// and ends the run; so does an iteration without merges.
ReduceResult reduce_context(const FormalContext& ctx, const Taxonomy& tax, const ReduceParams& params);

/// Replays a trace: the final label of every original label on each axis.
struct Representatives {
  std::map<std::string, std::string> objects;
  std::map<std::string, std::string> attributes;
};
Representatives replay(const FormalContext& original, const std::vector<MergeEvent>& trace);

}  // namespace evokit::reducer
