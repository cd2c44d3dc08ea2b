#include "evokit/fca.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <set>
#include <unordered_map>

#include "evokit/errors.hpp"

namespace evokit::fca {

FormalContext::FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes)
    : objects_(std::move(objects)), attributes_(std::move(attributes)) {
  rows_.assign(objects_.size(), Bits(attributes_.size()));
}

Bits FormalContext::column(std::size_t a) const {
  if (a >= attributes_.size()) throw Error(ErrorKind::input, "attribute index out of range");
  Bits out(objects_.size());
  for (std::size_t o = 0; o < objects_.size(); ++o) out[o] = rows_[o].test(a);
  return out;
}

Bits FormalContext::intent_of(const Bits& extent) const {
  Bits out(attributes_.size());
  out.set();
  for (auto o = extent.find_first(); o != Bits::npos; o = extent.find_next(o)) out &= rows_[o];
  return out;
}

Bits FormalContext::extent_of(const Bits& intent) const {
  Bits out(objects_.size());
  for (std::size_t o = 0; o < objects_.size(); ++o) out[o] = intent.is_subset_of(rows_[o]);
  return out;
}

void FormalContext::validate() const {
  auto unique = [](const std::vector<std::string>& labels, const char* axis) {
    std::set<std::string> seen;
    for (const auto& l : labels)
      if (!seen.insert(l).second) throw Error(ErrorKind::input, std::string("duplicate ") + axis + " label '" + l + "'");
  };
  unique(objects_, "object");
  unique(attributes_, "attribute");
}

std::vector<std::size_t> indices(const Bits& bits) {
  std::vector<std::size_t> out;
  for (auto i = bits.find_first(); i != Bits::npos; i = bits.find_next(i)) out.push_back(i);
  return out;
}

namespace {

bool canonical_less(const Concept& x, const Concept& y) {
  const auto cx = x.extent.count(), cy = y.extent.count();
  if (cx != cy) return cx < cy;
  return indices(x.extent) < indices(y.extent);
}

}  // namespace

std::vector<Concept> derive_concepts(const FormalContext& ctx) {
  const std::size_t m = ctx.n_attributes();
  auto close = [&](const Bits& intent) { return ctx.intent_of(ctx.extent_of(intent)); };

  std::vector<Concept> out;
  Bits a = close(Bits(m));
  while (true) {
    out.push_back({ctx.extent_of(a), a});
    bool advanced = false;
    for (std::size_t i = m; i-- > 0;) {
      if (a.test(i)) continue;
      Bits prefix = a;
      for (std::size_t j = i; j < m; ++j) prefix.reset(j);
      Bits candidate = prefix;
      candidate.set(i);
      candidate = close(candidate);
      // Lectic successor: nothing smaller than i was added.
      bool same_prefix = true;
      for (std::size_t j = 0; j < i && same_prefix; ++j) same_prefix = candidate.test(j) == prefix.test(j);
      if (same_prefix) {
        a = std::move(candidate);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> hasse_edges(const std::vector<Concept>& concepts) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (concepts.empty()) return edges;
  const std::size_t n_obj = concepts.front().extent.size();
  std::unordered_map<Bits, std::size_t, boost::hash<Bits>> by_extent;
  for (std::size_t i = 0; i < concepts.size(); ++i) by_extent.emplace(concepts[i].extent, i);

  // Object rows are needed to close X + {o}; rebuild them from the intents of
  // the object concepts, which is where every object's row lives.
  const std::size_t n_attr = concepts.front().intent.size();
  std::vector<Bits> rows(n_obj, Bits(n_attr));
  for (const auto& c : concepts)
    for (auto o = c.extent.find_first(); o != Bits::npos; o = c.extent.find_next(o)) rows[o] |= c.intent;

  for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
    const Bits& x = concepts[ci].extent;
    const Bits& intent = concepts[ci].intent;
    std::unordered_map<std::size_t, std::size_t> hits;
    for (std::size_t o = 0; o < n_obj; ++o) {
      if (x.test(o)) continue;
      const Bits b = intent & rows[o];
      Bits ext(n_obj);
      for (std::size_t p = 0; p < n_obj; ++p) ext[p] = b.is_subset_of(rows[p]);
      const auto it = by_extent.find(ext);
      if (it == by_extent.end()) throw Error(ErrorKind::input, "hasse_edges: concept list is not closed");
      const std::size_t cnt = ++hits[it->second];
      if (cnt == ext.count() - x.count()) edges.emplace_back(ci, it->second);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

namespace {

std::size_t max_matching(const std::vector<std::vector<std::size_t>>& adj, std::size_t n_right) {
  const std::size_t n = adj.size();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_right(n_right, none);
  std::vector<std::size_t> stamp(n_right, none);
  std::size_t matched = 0;
  for (std::size_t u = 0; u < n; ++u) {
    // Iterative augmenting path search (Kuhn).
    std::vector<std::pair<std::size_t, std::size_t>> stack{{u, 0}};
    std::vector<std::size_t> via;
    bool found = false;
    while (!stack.empty() && !found) {
      auto& [v, next] = stack.back();
      if (next == adj[v].size()) {
        stack.pop_back();
        if (!via.empty()) via.pop_back();
        continue;
      }
      const std::size_t r = adj[v][next++];
      if (stamp[r] == u) continue;
      stamp[r] = u;
      via.push_back(r);
      if (match_right[r] == none) {
        found = true;
      } else {
        stack.emplace_back(match_right[r], 0);
      }
    }
    if (!found) continue;
    // stack[i] is the left vertex that reached via[i].
    for (std::size_t i = 0; i < via.size(); ++i) match_right[via[i]] = stack[i].first;
    ++matched;
  }
  return matched;
}

}  // namespace

LatticeInvariants invariants(const std::vector<Concept>& concepts,
                             const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  LatticeInvariants inv;
  const std::size_t n = concepts.size();
  inv.n_concepts = n;
  inv.n_edges = edges.size();
  if (n == 0) return inv;

  std::vector<std::vector<std::size_t>> up(n), undirected(n);
  for (const auto& [c, p] : edges) {
    up[c].push_back(p);
    undirected[c].push_back(p);
    undirected[p].push_back(c);
  }
  // Concepts ordered by extent size form a topological order.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return concepts[a].extent.count() < concepts[b].extent.count(); });
  std::vector<std::size_t> level(n, 1);
  for (std::size_t v : order)
    for (std::size_t p : up[v]) level[p] = std::max(level[p], level[v] + 1);
  inv.height = *std::max_element(level.begin(), level.end());
  std::vector<std::size_t> per_level(inv.height + 1, 0);
  for (std::size_t l : level) ++per_level[l];
  inv.width_lower = *std::max_element(per_level.begin(), per_level.end());

  if (n <= kExactWidthLimit) {
    std::vector<std::vector<std::size_t>> above(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && concepts[i].extent.is_proper_subset_of(concepts[j].extent)) above[i].push_back(j);
    inv.width_upper = n - max_matching(above, n);
  } else {
    inv.width_upper = inv.width_lower;
  }

  std::size_t degree_sum = 0;
  for (const auto& nb : undirected) {
    inv.max_degree = std::max(inv.max_degree, nb.size());
    degree_sum += nb.size();
  }
  inv.mean_degree = static_cast<double>(degree_sum) / static_cast<double>(n);

  std::size_t girth = std::numeric_limits<std::size_t>::max();
  constexpr std::size_t unseen = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> dist(n, unseen), parent(n, unseen);
    std::queue<std::size_t> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      if (2 * dist[u] + 1 >= girth) break;
      for (std::size_t v : undirected[u]) {
        if (dist[v] == unseen) {
          dist[v] = dist[u] + 1;
          parent[v] = u;
          q.push(v);
        } else if (parent[u] != v) {
          girth = std::min(girth, dist[u] + dist[v] + 1);
        }
      }
    }
  }
  inv.girth = girth == std::numeric_limits<std::size_t>::max() ? 0 : girth;
  return inv;
}

ConceptLattice build_lattice(const FormalContext& ctx) {
  ConceptLattice l;
  l.concepts = derive_concepts(ctx);
  l.edges = hasse_edges(l.concepts);
  l.invariants = invariants(l.concepts, l.edges);
  return l;
}

double lattice_quality(const LatticeInvariants& original, const LatticeInvariants& reduced) {
  auto ratio = [](double a, double b) {
    if (a == b) return 1.0;
    return std::min(a, b) / std::max(a, b);
  };
  const double r = ratio(static_cast<double>(original.n_concepts), static_cast<double>(reduced.n_concepts)) +
                   ratio(static_cast<double>(original.n_edges), static_cast<double>(reduced.n_edges)) +
                   ratio(static_cast<double>(original.height), static_cast<double>(reduced.height)) +
                   ratio(original.width_mid(), reduced.width_mid());
  return r / 4.0;
}

void write_cxt(std::ostream& out, const FormalContext& ctx) {
  out << "B\n" << ctx.name << '\n' << ctx.n_objects() << '\n' << ctx.n_attributes() << "\n\n";
  for (const auto& o : ctx.objects()) out << o << '\n';
  for (const auto& a : ctx.attributes()) out << a << '\n';
  for (std::size_t o = 0; o < ctx.n_objects(); ++o) {
    for (std::size_t a = 0; a < ctx.n_attributes(); ++a) out << (ctx.incident(o, a) ? 'X' : '.');
    out << '\n';
  }
}

FormalContext read_cxt(std::istream& in) {
  std::size_t line_no = 0;
  auto next = [&](std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::parse, "cxt line " + std::to_string(line_no) + ": " + what);
  };
  auto count = [&](std::string& line) {
    if (!next(line)) fail("unexpected end of file");
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(line, &pos);
    } catch (const std::exception&) {
      fail("expected a count, got '" + line + "'");
    }
    if (pos != line.size()) fail("expected a count, got '" + line + "'");
    return static_cast<std::size_t>(v);
  };

  std::string line;
  if (!next(line) || line != "B") fail("missing 'B' header");
  if (!next(line)) fail("unexpected end of file");
  std::string name = line;
  const std::size_t n_obj = count(line);
  const std::size_t n_attr = count(line);

  std::vector<std::string> labels;
  bool skipped_blank = false;
  while (labels.size() < n_obj + n_attr) {
    if (!next(line)) fail("unexpected end of file in labels");
    if (line.empty() && labels.empty() && !skipped_blank) {
      skipped_blank = true;
      continue;
    }
    labels.push_back(line);
  }
  FormalContext ctx(std::vector<std::string>(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_obj)),
                    std::vector<std::string>(labels.begin() + static_cast<std::ptrdiff_t>(n_obj), labels.end()));
  ctx.name = std::move(name);
  for (std::size_t o = 0; o < n_obj; ++o) {
    if (!next(line)) fail("unexpected end of file in incidence rows");
    if (line.size() != n_attr) fail("row has " + std::to_string(line.size()) + " marks, expected " + std::to_string(n_attr));
    for (std::size_t a = 0; a < n_attr; ++a) {
      const char ch = line[a];
      if (ch == 'X' || ch == 'x') ctx.set(o, a);
      else if (ch != '.') fail(std::string("unexpected mark '") + ch + "'");
    }
  }
  ctx.validate();
  return ctx;
}

}  // namespace evokit::fca
