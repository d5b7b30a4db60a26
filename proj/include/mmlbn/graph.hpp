#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmlbn {

struct Arc {
  int from = 0;
  int to = 0;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Acyclic parent-set representation. Parent lists are kept sorted ascending.
class DagStructure {
 public:
  DagStructure() = default;
  explicit DagStructure(int num_nodes);
  /// Validates: indices in range, no self arcs, no duplicates, acyclic.
  DagStructure(int num_nodes, std::vector<std::vector<int>> parent_sets);
  static DagStructure from_arcs(int num_nodes, std::span<const Arc> arcs);

  int num_nodes() const noexcept { return static_cast<int>(parents_.size()); }
  const std::vector<int>& parents(int node) const { return parents_[node]; }
  const std::vector<std::vector<int>>& parent_sets() const noexcept { return parents_; }
  bool has_arc(int from, int to) const;
  int arc_count() const noexcept { return arc_count_; }
  /// Arcs sorted by (from, to).
  std::vector<Arc> arcs() const;

  /// Copy with one arc removed; removal cannot create a cycle.
  DagStructure without_arc(int from, int to) const;

  /// True if `target` is reachable from `source` along directed arcs.
  bool reaches(int source, int target) const;

  std::size_t hash() const noexcept;
  friend bool operator==(const DagStructure&, const DagStructure&) = default;

 private:
  std::vector<std::vector<int>> parents_;
  int arc_count_ = 0;
};

struct DagHash {
  std::size_t operator()(const DagStructure& d) const noexcept { return d.hash(); }
};

enum class MoveKind { Toggle, Reverse };

struct ArcMove {
  MoveKind kind = MoveKind::Toggle;
  int from = 0;
  int to = 0;
};

/// Toggle adds from->to if absent, else deletes it. Reverse turns to->from
/// into from->to. Throws Cycle, ParentCap or NoArc errors for illegal moves.
DagStructure apply_move(const DagStructure& dag, const ArcMove& move, int max_parents);

using ExtensionCount = unsigned __int128;

inline constexpr int kMaxExtensionNodes = 24;

/// Number of topological orderings of the DAG. Exact; requires at most 24 nodes.
ExtensionCount count_linear_extensions(const DagStructure& dag);

/// log[(O / m!) p^E (1-p)^(m(m-1)/2 - E)] in nits.
double structure_log_prior(const DagStructure& dag, double arc_prior);

/// Canonical encoding of the skeleton and v-structure set.
struct EquivalenceKey {
  std::string bytes;
  friend bool operator==(const EquivalenceKey&, const EquivalenceKey&) = default;
  friend auto operator<=>(const EquivalenceKey&, const EquivalenceKey&) = default;
};

struct EquivalenceKeyHash {
  std::size_t operator()(const EquivalenceKey& k) const noexcept {
    return std::hash<std::string>{}(k.bytes);
  }
};

EquivalenceKey cpdag_key(const DagStructure& dag);

std::string format_arc(const Arc& arc);

/// Parses "i->j" arcs separated by newlines, commas or whitespace. Endpoints
/// may be indices or variable names. The single word "empty" (or no arcs)
/// yields the empty graph. Lines starting with '#' are ignored.
DagStructure parse_structure(int num_nodes, std::string_view text,
                             const std::vector<std::string>& names = {});

}  // namespace mmlbn
