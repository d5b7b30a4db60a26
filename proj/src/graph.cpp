#include "mmlbn/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

#include "mmlbn/error.hpp"

namespace mmlbn {

namespace {

bool is_acyclic(const std::vector<std::vector<int>>& parents) {
  const int m = static_cast<int>(parents.size());
  std::vector<int> pending(m);
  std::vector<std::vector<int>> children(m);
  for (int v = 0; v < m; ++v) {
    pending[v] = static_cast<int>(parents[v].size());
    for (int p : parents[v]) children[p].push_back(v);
  }
  std::vector<int> ready;
  for (int v = 0; v < m; ++v)
    if (pending[v] == 0) ready.push_back(v);
  int seen = 0;
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int c : children[v])
      if (--pending[c] == 0) ready.push_back(c);
  }
  return seen == m;
}

long double to_long_double(ExtensionCount x) {
  long double hi = static_cast<long double>(static_cast<std::uint64_t>(x >> 64));
  long double lo = static_cast<long double>(static_cast<std::uint64_t>(x));
  return hi * 18446744073709551616.0L + lo;
}

// Counts orderings of a connected component via the lattice of downward-closed
// subsets; pred[i] is the bitmask of in-component predecessors of local node i.
ExtensionCount count_component(const std::vector<std::uint32_t>& pred) {
  const std::size_t n = pred.size();
  if (n <= 1) return 1;
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  std::vector<ExtensionCount> ways(std::size_t{1} << n, 0);
  ways[0] = 1;
  for (std::uint32_t s = 0; s < full; ++s) {
    const ExtensionCount w = ways[s];
    if (w == 0) continue;
    for (std::size_t v = 0; v < n; ++v) {
      const std::uint32_t bit = std::uint32_t{1} << v;
      if ((s & bit) == 0 && (pred[v] & ~s) == 0) ways[s | bit] += w;
    }
  }
  return ways[full];
}

ExtensionCount binomial(int n, int k) {
  ExtensionCount r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<ExtensionCount>(n - k + i) / i;
  return r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void put_u16(std::string& out, int v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

DagStructure::DagStructure(int num_nodes) {
  if (num_nodes < 0) throw Error(ErrorCode::Argument, "dag: negative node count");
  parents_.resize(num_nodes);
}

DagStructure::DagStructure(int num_nodes, std::vector<std::vector<int>> parent_sets)
    : parents_(std::move(parent_sets)) {
  if (static_cast<int>(parents_.size()) != num_nodes)
    throw Error(ErrorCode::Argument, "dag: parent-set count differs from node count");
  for (int v = 0; v < num_nodes; ++v) {
    auto& ps = parents_[v];
    std::sort(ps.begin(), ps.end());
    if (std::adjacent_find(ps.begin(), ps.end()) != ps.end())
      throw Error(ErrorCode::Argument, "dag: duplicate parent");
    for (int p : ps) {
      if (p < 0 || p >= num_nodes) throw Error(ErrorCode::Argument, "dag: parent out of range");
      if (p == v) throw Error(ErrorCode::Cycle, "dag: self arc");
    }
    arc_count_ += static_cast<int>(ps.size());
  }
  if (!is_acyclic(parents_)) throw Error(ErrorCode::Cycle, "dag: graph contains a cycle");
}

DagStructure DagStructure::from_arcs(int num_nodes, std::span<const Arc> arcs) {
  std::vector<std::vector<int>> ps(num_nodes < 0 ? 0 : num_nodes);
  for (const Arc& a : arcs) {
    if (a.to < 0 || a.to >= num_nodes) throw Error(ErrorCode::Argument, "dag: node out of range");
    ps[a.to].push_back(a.from);
  }
  return DagStructure(num_nodes, std::move(ps));
}

bool DagStructure::has_arc(int from, int to) const {
  const auto& ps = parents_[to];
  return std::binary_search(ps.begin(), ps.end(), from);
}

std::vector<Arc> DagStructure::arcs() const {
  std::vector<Arc> out;
  out.reserve(arc_count_);
  for (int v = 0; v < num_nodes(); ++v)
    for (int p : parents_[v]) out.push_back({p, v});
  std::sort(out.begin(), out.end());
  return out;
}

DagStructure DagStructure::without_arc(int from, int to) const {
  if (!has_arc(from, to)) throw Error(ErrorCode::NoArc, "dag: arc to remove is absent");
  DagStructure out = *this;
  auto& ps = out.parents_[to];
  ps.erase(std::lower_bound(ps.begin(), ps.end(), from));
  --out.arc_count_;
  return out;
}

bool DagStructure::reaches(int source, int target) const {
  // Walk ancestors of target looking for source.
  if (source == target) return true;
  std::vector<char> seen(parents_.size(), 0);
  std::vector<int> stack{target};
  seen[target] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int p : parents_[v]) {
      if (p == source) return true;
      if (!seen[p]) {
        seen[p] = 1;
        stack.push_back(p);
      }
    }
  }
  return false;
}

std::size_t DagStructure::hash() const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::size_t x) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (const auto& ps : parents_) {
    mix(ps.size());
    for (int p : ps) mix(static_cast<std::size_t>(p));
  }
  return h;
}

DagStructure apply_move(const DagStructure& dag, const ArcMove& move, int max_parents) {
  const int m = dag.num_nodes();
  if (move.from < 0 || move.to < 0 || move.from >= m || move.to >= m || move.from == move.to)
    throw Error(ErrorCode::Argument, "move: invalid node pair");

  auto add_arc = [&](DagStructure base, int from, int to) {
    if (static_cast<int>(base.parents(to).size()) + 1 > max_parents)
      throw Error(ErrorCode::ParentCap, "move: parent cap exceeded");
    if (base.reaches(to, from)) throw Error(ErrorCode::Cycle, "move: would create a cycle");
    auto ps = base.parent_sets();
    ps[to].push_back(from);
    return DagStructure(m, std::move(ps));
  };

  if (move.kind == MoveKind::Toggle) {
    if (dag.has_arc(move.from, move.to)) return dag.without_arc(move.from, move.to);
    return add_arc(dag, move.from, move.to);
  }
  if (!dag.has_arc(move.to, move.from))
    throw Error(ErrorCode::NoArc, "move: no arc to reverse");
  return add_arc(dag.without_arc(move.to, move.from), move.from, move.to);
}

ExtensionCount count_linear_extensions(const DagStructure& dag) {
  const int m = dag.num_nodes();
  if (m > kMaxExtensionNodes)
    throw Error(ErrorCode::Capacity, "linear extensions: more than 24 nodes");

  // Weakly connected components; the count factorizes as a multinomial
  // interleaving of independent component orderings.
  std::vector<int> comp(m, -1);
  std::vector<std::vector<int>> adj(m);
  for (int v = 0; v < m; ++v)
    for (int p : dag.parents(v)) {
      adj[v].push_back(p);
      adj[p].push_back(v);
    }
  ExtensionCount total = 1;
  int placed = 0;
  for (int start = 0; start < m; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> members{start};
    comp[start] = start;
    for (std::size_t i = 0; i < members.size(); ++i)
      for (int u : adj[members[i]])
        if (comp[u] < 0) {
          comp[u] = start;
          members.push_back(u);
        }
    std::sort(members.begin(), members.end());
    std::vector<int> local(m, -1);
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<int>(i);
    std::vector<std::uint32_t> pred(members.size(), 0);
    for (std::size_t i = 0; i < members.size(); ++i)
      for (int p : dag.parents(members[i])) pred[i] |= std::uint32_t{1} << local[p];

    const int size = static_cast<int>(members.size());
    placed += size;
    total *= binomial(placed, size) * count_component(pred);
  }
  return total;
}

double structure_log_prior(const DagStructure& dag, double arc_prior) {
  if (!(arc_prior > 0.0 && arc_prior < 1.0))
    throw Error(ErrorCode::Argument, "structure prior: p must lie in (0, 1)");
  const double m = dag.num_nodes();
  const double e = dag.arc_count();
  const double max_arcs = m * (m - 1.0) / 2.0;
  const double log_orderings =
      static_cast<double>(std::log(to_long_double(count_linear_extensions(dag))));
  return log_orderings - std::lgamma(m + 1.0) + e * std::log(arc_prior) +
         (max_arcs - e) * std::log1p(-arc_prior);
}

EquivalenceKey cpdag_key(const DagStructure& dag) {
  const int m = dag.num_nodes();
  std::vector<std::pair<int, int>> edges;
  for (const Arc& a : dag.arcs()) edges.emplace_back(std::min(a.from, a.to), std::max(a.from, a.to));
  std::sort(edges.begin(), edges.end());

  auto adjacent = [&dag](int x, int y) { return dag.has_arc(x, y) || dag.has_arc(y, x); };
  std::vector<std::array<int, 3>> vstructs;
  for (int w = 0; w < m; ++w) {
    const auto& ps = dag.parents(w);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j)
        if (!adjacent(ps[i], ps[j])) vstructs.push_back({ps[i], ps[j], w});
  }
  std::sort(vstructs.begin(), vstructs.end());

  EquivalenceKey key;
  key.bytes.reserve(6 + 4 * edges.size() + 6 * vstructs.size());
  put_u16(key.bytes, m);
  put_u16(key.bytes, static_cast<int>(edges.size()));
  for (auto [x, y] : edges) {
    put_u16(key.bytes, x);
    put_u16(key.bytes, y);
  }
  put_u16(key.bytes, static_cast<int>(vstructs.size()));
  for (const auto& t : vstructs)
    for (int v : t) put_u16(key.bytes, v);
  return key;
}

std::string format_arc(const Arc& arc) {
  return std::to_string(arc.from) + "->" + std::to_string(arc.to);
}

DagStructure parse_structure(int num_nodes, std::string_view text,
                             const std::vector<std::string>& names) {
  auto resolve = [&](std::string_view token) -> int {
    token = trim(token);
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == token) return static_cast<int>(i);
    int idx = -1;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
    if (ec != std::errc{} || ptr != token.data() + token.size() || idx < 0 || idx >= num_nodes)
      throw Error(ErrorCode::Format, "structure: unknown node '" + std::string(token) + "'");
    return idx;
  };

  std::vector<Arc> arcs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find_first_of(",\n", pos);
    if (end == std::string_view::npos) end = text.size();
    auto item = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (item.empty() || item.front() == '#' || item == "empty") continue;
    auto arrow = item.find("->");
    if (arrow == std::string_view::npos)
      throw Error(ErrorCode::Format, "structure: expected 'from->to', got '" + std::string(item) + "'");
    arcs.push_back({resolve(item.substr(0, arrow)), resolve(item.substr(arrow + 2))});
  }
  return DagStructure::from_arcs(num_nodes, arcs);
}

}  // namespace mmlbn
