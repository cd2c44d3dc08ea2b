#include "evokit/reducer.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <sstream>
#include <tuple>

#include "evokit/errors.hpp"

namespace evokit::reducer {

std::size_t Taxonomy::find(std::size_t s) const {
  while (synset_parent_[s] != s) s = synset_parent_[s];
  return s;
}

void Taxonomy::add_parent(const std::string& child, const std::string& parent) {
  parents_[child].insert(parent);
}

void Taxonomy::add_synonyms(const std::vector<std::string>& terms) {
  const std::size_t id = synset_parent_.size();
  synset_parent_.push_back(id);
  for (const auto& t : terms) {
    const auto it = synset_of_.find(t);
    if (it == synset_of_.end()) {
      synset_of_.emplace(t, id);
    } else {
      synset_parent_[find(it->second)] = find(id);
    }
  }
}

std::optional<std::size_t> Taxonomy::synset_id(const std::string& term) const {
  const auto it = synset_of_.find(term);
  if (it == synset_of_.end()) return std::nullopt;
  return find(it->second);
}

bool Taxonomy::synonyms(const std::string& a, const std::string& b) const {
  const auto sa = synset_id(a);
  return sa && sa == synset_id(b);
}

std::vector<std::string> Taxonomy::synonyms_of(const std::string& term) const {
  std::vector<std::string> out{term};
  const auto id = synset_id(term);
  if (!id) return out;
  for (const auto& [t, s] : synset_of_)
    if (t != term && find(s) == *id) out.push_back(t);
  return out;
}

std::map<std::string, std::size_t> Taxonomy::ancestors(const std::string& term, std::size_t max_depth) const {
  std::map<std::string, std::size_t> dist;
  std::deque<std::string> queue;
  auto reach = [&](const std::string& t, std::size_t d) {
    for (const auto& s : synonyms_of(t))
      if (dist.emplace(s, d).second) queue.push_back(s);
  };
  reach(term, 0);
  while (!queue.empty()) {
    const std::string t = queue.front();
    queue.pop_front();
    const std::size_t d = dist[t];
    if (d == max_depth) continue;
    const auto it = parents_.find(t);
    if (it == parents_.end()) continue;
    for (const auto& p : it->second) reach(p, d + 1);
  }
  return dist;
}

void Taxonomy::check_acyclic() const {
  enum class Mark { open, done };
  std::map<std::string, Mark> mark;
  for (const auto& [root, unused] : parents_) {
    if (mark.count(root)) continue;
    // Iterative DFS holding (term, iterator into its parent set).
    std::vector<std::pair<std::string, std::set<std::string>::const_iterator>> stack;
    auto enter = [&](const std::string& t) {
      mark[t] = Mark::open;
      const auto it = parents_.find(t);
      static const std::set<std::string> none;
      stack.emplace_back(t, it == parents_.end() ? none.begin() : it->second.begin());
    };
    enter(root);
    while (!stack.empty()) {
      auto& [t, it] = stack.back();
      const auto pit = parents_.find(t);
      if (pit == parents_.end() || it == pit->second.end()) {
        mark[t] = Mark::done;
        stack.pop_back();
        continue;
      }
      const std::string p = *it++;
      const auto m = mark.find(p);
      if (m == mark.end()) {
        enter(p);
      } else if (m->second == Mark::open) {
        throw Error(ErrorKind::input, "taxonomy has a cycle through '" + p + "'");
      }
    }
  }
}

Taxonomy read_taxonomy(std::istream& in) {
  Taxonomy tax;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (!line.empty() && line.back() == '\t') fields.emplace_back();
    auto bad = [&](const std::string& what) {
      throw Error(ErrorKind::parse, "taxonomy line " + std::to_string(line_no) + ": " + what);
    };
    for (const auto& field : fields)
      if (field.empty()) bad("empty field");
    if (fields.front() == "syn") {
      if (fields.size() < 3) bad("a synonym line needs at least two terms");
      tax.add_synonyms({fields.begin() + 1, fields.end()});
    } else {
      if (fields.size() != 2) bad("expected 'child<TAB>parent', got " + std::to_string(fields.size()) + " fields");
      if (fields[0] == fields[1]) throw Error(ErrorKind::input, "taxonomy line " + std::to_string(line_no) +
                                                                    ": '" + fields[0] + "' is its own parent (cycle)");
      tax.add_parent(fields[0], fields[1]);
    }
  }
  tax.check_acyclic();
  return tax;
}

void ReduceParams::validate() const {
  if (hypernym_depth < 1 || hyponym_depth < 1) throw Error(ErrorKind::parameter, "taxonomy depths must be at least 1");
  if (max_iterations < 1) throw Error(ErrorKind::parameter, "max iterations must be at least 1");
  if (!(quality_floor >= 0.0 && quality_floor <= 1.0))
    throw Error(ErrorKind::parameter, "quality floor must lie in [0, 1]");
}

std::string_view to_string(PairKind k) {
  switch (k) {
    case PairKind::similar: return "similar";
    case PairKind::related: return "related";
    case PairKind::unrelated: return "unrelated";
  }
  return "?";
}

std::string_view to_string(Axis a) { return a == Axis::object ? "object" : "attribute"; }

std::vector<std::pair<std::size_t, std::size_t>> enumerate_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n > 1) out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> enumerate_pairs(const std::vector<std::string>& labels) {
  return enumerate_pairs(labels.size());
}

namespace {

/// Lowest common ancestor under the depth bound; `proper` skips ancestors at
/// distance 0 from either side.
std::optional<std::string> common_hypernym(const std::string& a, const std::string& b, const Taxonomy& tax,
                                           const ReduceParams& params, bool proper) {
  const std::size_t depth = std::min(params.hypernym_depth, params.hyponym_depth);
  const auto up_a = tax.ancestors(a, depth);
  const auto up_b = tax.ancestors(b, depth);
  std::optional<std::tuple<std::size_t, std::size_t, std::string>> best;
  for (const auto& [h, da] : up_a) {
    const auto it = up_b.find(h);
    if (it == up_b.end()) continue;
    const std::size_t db = it->second;
    if (proper && (da == 0 || db == 0)) continue;
    std::tuple<std::size_t, std::size_t, std::string> key{std::max(da, db), da + db, h};
    if (!best || key < *best) best = key;
  }
  if (!best) return std::nullopt;
  return std::get<2>(*best);
}

}  // namespace

PairKind classify_pair(const std::string& a, const std::string& b, const Taxonomy& tax,
                       const ReduceParams& params) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::input, "classify_pair: empty term");
  if (a == b || tax.synonyms(a, b)) return PairKind::similar;
  return common_hypernym(a, b, tax, params, false) ? PairKind::related : PairKind::unrelated;
}

std::string merge_label(const std::string& a, const std::string& b, const Taxonomy& tax,
                        const ReduceParams& params) {
  switch (classify_pair(a, b, tax, params)) {
    case PairKind::similar: {
      const auto h = common_hypernym(a, b, tax, params, true);
      return h ? *h : std::min(a, b);
    }
    case PairKind::related: return *common_hypernym(a, b, tax, params, false);
    case PairKind::unrelated: break;
  }
  return {};
}

FormalContext merge_pair(const FormalContext& ctx, Axis axis, std::size_t i, std::size_t j,
                         const std::string& new_label) {
  const bool objects = axis == Axis::object;
  const std::size_t n = objects ? ctx.n_objects() : ctx.n_attributes();
  if (i >= n || j >= n || i == j)
    throw Error(ErrorKind::parameter, "merge_pair: indices " + std::to_string(i) + ", " + std::to_string(j) +
                                          " invalid for " + std::to_string(n) + " " + std::string(to_string(axis)) + "s");
  const std::size_t keep = std::min(i, j), drop = std::max(i, j);
  const auto& labels = objects ? ctx.objects() : ctx.attributes();
  for (std::size_t k = 0; k < n; ++k)
    if (k != i && k != j && labels[k] == new_label)
      throw Error(ErrorKind::input, "merge_pair: label '" + new_label + "' already names another line");

  std::vector<std::string> merged;
  std::vector<std::size_t> source;  // old index per new index
  for (std::size_t k = 0; k < n; ++k) {
    if (k == drop) continue;
    merged.push_back(k == keep ? new_label : labels[k]);
    source.push_back(k);
  }
  FormalContext out = objects ? FormalContext(merged, ctx.attributes()) : FormalContext(ctx.objects(), merged);
  out.name = ctx.name;
  for (std::size_t o = 0; o < out.n_objects(); ++o)
    for (std::size_t a = 0; a < out.n_attributes(); ++a) {
      bool v;
      if (objects) {
        const std::size_t so = source[o];
        v = ctx.incident(so, a) || (so == keep && ctx.incident(drop, a));
      } else {
        const std::size_t sa = source[a];
        v = ctx.incident(o, sa) || (sa == keep && ctx.incident(o, drop));
      }
      if (v) out.set(o, a);
    }
  return out;
}

namespace {

/// One scan over the pairs of an axis. Merged lines keep their slot, so the
/// scan continues with the new label against the remaining lines.
std::size_t scan_axis(FormalContext& ctx, Axis axis, const Taxonomy& tax, const ReduceParams& params,
                      std::size_t iteration, std::vector<MergeEvent>& trace) {
  std::size_t merges = 0;
  auto labels = [&]() -> const std::vector<std::string>& {
    return axis == Axis::object ? ctx.objects() : ctx.attributes();
  };
  for (std::size_t i = 0; i < labels().size(); ++i) {
    std::size_t j = i + 1;
    while (j < labels().size()) {
      const std::string a = labels()[i], b = labels()[j];
      const PairKind kind = classify_pair(a, b, tax, params);
      if (kind == PairKind::unrelated) {
        ++j;
        continue;
      }
      std::string label = merge_label(a, b, tax, params);
      for (std::size_t k = 0; k < labels().size(); ++k)
        if (k != i && k != j && labels()[k] == label) label = std::min(a, b);
      ctx = merge_pair(ctx, axis, i, j, label);
      trace.push_back({iteration, axis, a, b, label, kind});
      ++merges;
    }
  }
  return merges;
}

}  // namespace

ReduceResult reduce_context(const FormalContext& ctx, const Taxonomy& tax, const ReduceParams& params) {
  params.validate();
  ctx.validate();
  if (ctx.n_objects() == 0 || ctx.n_attributes() == 0) throw Error(ErrorKind::input, "reduce_context: empty context");

  ReduceResult r;
  r.original = fca::build_lattice(ctx).invariants;
  r.final = r.original;
  r.reduced = ctx;
  r.stop_reason = "max_iterations";
  for (std::size_t it = 1; it <= params.max_iterations; ++it) {
    r.iterations = it;
    FormalContext next = r.reduced;
    const std::size_t mark = r.trace.size();
    std::size_t merges = scan_axis(next, Axis::attribute, tax, params, it, r.trace);
    merges += scan_axis(next, Axis::object, tax, params, it, r.trace);
    if (merges == 0) {
      r.stop_reason = "no_merge";
      break;
    }
    const auto inv = fca::build_lattice(next).invariants;
    const double q = fca::lattice_quality(r.original, inv);
    if (q < params.quality_floor) {
      r.trace.resize(mark);
      r.stop_reason = "quality_floor";
      break;
    }
    r.reduced = std::move(next);
    r.final = inv;
    r.quality = q;
  }
  return r;
}

Representatives replay(const FormalContext& original, const std::vector<MergeEvent>& trace) {
  Representatives rep;
  for (const auto& o : original.objects()) rep.objects[o] = o;
  for (const auto& a : original.attributes()) rep.attributes[a] = a;
  for (const auto& e : trace) {
    auto& m = e.axis == Axis::object ? rep.objects : rep.attributes;
    for (auto& [label, current] : m)
      if (current == e.a || current == e.b) current = e.label;
  }
  return rep;
}

}  // namespace evokit::reducer
