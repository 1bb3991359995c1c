#pragma once

#include "mtcpp/offspring.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mtcpp {

struct TreeNode {
  int generation = 0;  // -T for roots, 0 for the standing population
  int index = 1;       // 1-based planar position within the generation
  TypeIndex type;
  int parent = -1;     // node id, -1 for roots
  std::vector<int> children;  // node ids, left to right
};

/// Planar forest whose roots all sit at generation -T.
class PlanarTree {
 public:
  PlanarTree() = default;
  explicit PlanarTree(int depth) : depth_(depth), levels_(depth + 1) {}

  int depth() const { return depth_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int id) const { return nodes_.at(id); }
  /// Node ids of generation `gen` (in -T..0), left to right.
  const std::vector<int>& generation(int gen) const { return levels_.at(depth_ + gen); }
  int size() const { return static_cast<int>(nodes_.size()); }

  int add_root(TypeIndex type);
  int add_child(int parent, TypeIndex type);

  /// Appends `other` to the right of this forest. Depths must agree.
  void append(const PlanarTree& other);

  /// Recomputes generation lists and planar indices by a left-to-right
  /// depth-first pass from the roots.
  void reindex();

  /// Structural equality: same generations, types and parent indices.
  friend bool operator==(const PlanarTree& a, const PlanarTree& b);

 private:
  int depth_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<int>> levels_;
};

inline constexpr std::int64_t kDefaultNodeCap = 10'000'000;
inline constexpr std::int64_t kDefaultRejectionCap = 1'000'000;

/// Grows a single-root tree from generation -depth down to generation 0.
PlanarTree simulate_forward(const OffspringLaw& law, Ordering ordering, TypeIndex root_type,
                            int depth, Rng& rng, std::int64_t node_cap = kDefaultNodeCap);

enum class StandingMode {
  reject,       // first tree with a nonempty generation 0
  concatenate,  // surviving trees side by side until target_width is reached
};

struct StandingSample {
  PlanarTree tree;
  std::int64_t rejections = 0;  // extinct trees discarded
  int trees = 0;                // surviving trees in the forest
};

StandingSample simulate_standing(const OffspringLaw& law, Ordering ordering,
                                 TypeIndex root_type, int depth, StandingMode mode,
                                 int target_width, Rng& rng,
                                 std::int64_t node_cap = kDefaultNodeCap,
                                 std::int64_t rejection_cap = kDefaultRejectionCap);

struct StandingIndividual {
  int index = 1;
  TypeIndex type;
};

std::vector<StandingIndividual> standing_population(const PlanarTree& tree);

/// a_i(n): planar index in generation -n of the ancestor of (0, i).
int ancestor_index(const PlanarTree& tree, int i, int n);

struct CoalescentRecord {
  int i = 1;
  std::optional<int> A;  // empty when censored at the horizon
  int mass = 0;          // survivors of the MRCA right of the lineage of (0, i)
  TypeList lineage;      // types of the ancestors of (0, i+1) in generations 0..-(A-1)
  TypeList lineage_inf;  // the same, out to generation -(T-1)
};

std::vector<CoalescentRecord> coalescence_times(const PlanarTree& tree);

/// C_{i,j} = max(A_i, ..., A_{j-1}); empty if any entry in range is censored.
std::optional<int> pairwise_coalescence(const std::vector<std::optional<int>>& A, int i, int j);

std::vector<std::optional<int>> coalescence_values(const std::vector<CoalescentRecord>& records);

/// B_{l,1}, B_{l,2}, ...: the largest A between consecutive standing
/// individuals of type l. Censored if any A in the gap is censored.
std::vector<std::optional<int>> sametype_times(const std::vector<CoalescentRecord>& records,
                                               const TypeList& standing_types, TypeIndex ell);

/// Per node id: 1 if the node has a descendant in generation 0.
std::vector<char> surviving_nodes(const PlanarTree& tree);

/// Subforest of nodes with a descendant in generation 0, reindexed.
PlanarTree ancestral_tree(const PlanarTree& tree);

/// One `gen\tindex\ttype\tparent_index` line per node, roots have parent 0.
void write_tree_tsv(std::ostream& os, const PlanarTree& tree);
void write_records_csv(std::ostream& os, const std::vector<CoalescentRecord>& records);

}  // namespace mtcpp
