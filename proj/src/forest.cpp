#include "mtcpp/forest.hpp"

#include <algorithm>
#include <ostream>

namespace mtcpp {

int PlanarTree::add_root(TypeIndex type) {
  const int id = size();
  levels_.at(0).push_back(id);
  nodes_.push_back({-depth_, static_cast<int>(levels_[0].size()), type, -1, {}});
  return id;
}

int PlanarTree::add_child(int parent, TypeIndex type) {
  const int gen = nodes_.at(parent).generation + 1;
  if (gen > 0) throw DomainError("add_child: below generation 0");
  const int id = size();
  auto& level = levels_.at(depth_ + gen);
  level.push_back(id);
  nodes_.push_back({gen, static_cast<int>(level.size()), type, parent, {}});
  nodes_[parent].children.push_back(id);
  return id;
}

void PlanarTree::append(const PlanarTree& other) {
  if (other.depth_ != depth_) throw DomainError("append: depth mismatch");
  const int offset = size();
  for (TreeNode n : other.nodes_) {
    if (n.parent >= 0) n.parent += offset;
    for (int& c : n.children) c += offset;
    nodes_.push_back(std::move(n));
  }
  for (int d = 0; d <= depth_; ++d) {
    for (int id : other.levels_[d]) {
      levels_[d].push_back(id + offset);
      nodes_[id + offset].index = static_cast<int>(levels_[d].size());
    }
  }
}

void PlanarTree::reindex() {
  for (auto& level : levels_) level.clear();
  std::vector<int> roots;
  for (int id = 0; id < size(); ++id) {
    if (nodes_[id].parent < 0) roots.push_back(id);
  }
  // Roots keep their relative order from the previous layout.
  std::sort(roots.begin(), roots.end(),
            [&](int a, int b) { return nodes_[a].index < nodes_[b].index; });
  std::vector<int> stack;
  for (int r : roots) {
    stack.push_back(r);
    while (!stack.empty()) {
      const int id = stack.back();
      stack.pop_back();
      auto& level = levels_[depth_ + nodes_[id].generation];
      level.push_back(id);
      nodes_[id].index = static_cast<int>(level.size());
      const auto& ch = nodes_[id].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
  }
}

bool operator==(const PlanarTree& a, const PlanarTree& b) {
  if (a.depth_ != b.depth_ || a.size() != b.size()) return false;
  for (int d = 0; d <= a.depth_; ++d) {
    const auto& la = a.levels_[d];
    const auto& lb = b.levels_[d];
    if (la.size() != lb.size()) return false;
    for (std::size_t j = 0; j < la.size(); ++j) {
      const TreeNode& x = a.nodes_[la[j]];
      const TreeNode& y = b.nodes_[lb[j]];
      if (x.type != y.type || x.index != y.index) return false;
      const int px = x.parent < 0 ? 0 : a.nodes_[x.parent].index;
      const int py = y.parent < 0 ? 0 : b.nodes_[y.parent].index;
      if (px != py) return false;
    }
  }
  return true;
}

PlanarTree simulate_forward(const OffspringLaw& law, Ordering ordering, TypeIndex root_type,
                            int depth, Rng& rng, std::int64_t node_cap) {
  if (depth < 1) throw DomainError("simulate_forward: depth must be at least 1");
  check_type(law.k(), root_type);
  PlanarTree tree(depth);
  tree.add_root(root_type);
  for (int gen = -depth; gen < 0; ++gen) {
    // Copy: add_child extends the next generation's list, not this one.
    const std::vector<int> parents = tree.generation(gen);
    for (int id : parents) {
      for (TypeIndex t : law.sample(tree.node(id).type, ordering, rng)) {
        tree.add_child(id, t);
        if (tree.size() > node_cap) {
          throw GuardError("simulate_forward: node cap of " + std::to_string(node_cap) +
                           " exceeded");
        }
      }
    }
  }
  return tree;
}

StandingSample simulate_standing(const OffspringLaw& law, Ordering ordering,
                                 TypeIndex root_type, int depth, StandingMode mode,
                                 int target_width, Rng& rng, std::int64_t node_cap,
                                 std::int64_t rejection_cap) {
  if (depth < 1) throw DomainError("simulate_standing: depth must be at least 1");
  StandingSample out;
  out.tree = PlanarTree(depth);
  const int width_goal = mode == StandingMode::reject ? 1 : std::max(1, target_width);
  while (static_cast<int>(out.tree.generation(0).size()) < width_goal) {
    PlanarTree t = simulate_forward(law, ordering, root_type, depth, rng, node_cap);
    if (t.generation(0).empty()) {
      if (++out.rejections > rejection_cap) {
        throw GuardError("simulate_standing: rejection cap exceeded");
      }
      continue;
    }
    if (out.tree.size() + t.size() > node_cap) {
      throw GuardError("simulate_standing: node cap exceeded");
    }
    out.tree.append(t);
    ++out.trees;
  }
  return out;
}

std::vector<StandingIndividual> standing_population(const PlanarTree& tree) {
  std::vector<StandingIndividual> out;
  for (int id : tree.generation(0)) out.push_back({tree.node(id).index, tree.node(id).type});
  return out;
}

int ancestor_index(const PlanarTree& tree, int i, int n) {
  const auto& standing = tree.generation(0);
  if (i < 1 || i > static_cast<int>(standing.size())) {
    throw DomainError("ancestor_index: no standing individual " + std::to_string(i));
  }
  if (n < 0 || n > tree.depth()) throw DomainError("ancestor_index: n outside 0..T");
  int id = standing[i - 1];
  for (int s = 0; s < n; ++s) id = tree.node(id).parent;
  return tree.node(id).index;
}

std::vector<char> surviving_nodes(const PlanarTree& tree) {
  std::vector<char> alive(tree.size(), 0);
  for (int id : tree.generation(0)) alive[id] = 1;
  for (int gen = -1; gen >= -tree.depth(); --gen) {
    for (int id : tree.generation(gen)) {
      for (int c : tree.node(id).children) {
        if (alive[c]) {
          alive[id] = 1;
          break;
        }
      }
    }
  }
  return alive;
}

std::vector<CoalescentRecord> coalescence_times(const PlanarTree& tree) {
  const auto& standing = tree.generation(0);
  const std::vector<char> alive = surviving_nodes(tree);
  std::vector<CoalescentRecord> out;
  for (std::size_t j = 0; j + 1 < standing.size(); ++j) {
    CoalescentRecord rec;
    rec.i = static_cast<int>(j) + 1;
    int x = standing[j];
    int y = standing[j + 1];
    for (int n = 1; n <= tree.depth(); ++n) {
      rec.lineage_inf.push_back(tree.node(y).type);
      const int child_x = x;
      x = tree.node(x).parent;
      y = tree.node(y).parent;
      if (!rec.A && x == y) {
        rec.A = n;
        rec.lineage = rec.lineage_inf;
        const auto& ch = tree.node(x).children;
        auto pos = std::find(ch.begin(), ch.end(), child_x);
        rec.mass = static_cast<int>(
            std::count_if(pos + 1, ch.end(), [&](int c) { return alive[c] != 0; }));
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::optional<int>> coalescence_values(const std::vector<CoalescentRecord>& records) {
  std::vector<std::optional<int>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.A);
  return out;
}

std::optional<int> pairwise_coalescence(const std::vector<std::optional<int>>& A, int i, int j) {
  if (i < 1 || j <= i || j - 1 > static_cast<int>(A.size())) {
    throw DomainError("pairwise_coalescence: need 1 <= i < j <= width");
  }
  int best = 0;
  for (int r = i; r < j; ++r) {
    if (!A[r - 1]) return std::nullopt;
    best = std::max(best, *A[r - 1]);
  }
  return best;
}

std::vector<std::optional<int>> sametype_times(const std::vector<CoalescentRecord>& records,
                                               const TypeList& standing_types, TypeIndex ell) {
  if (!standing_types.empty() && records.size() + 1 != standing_types.size()) {
    throw DomainError("sametype_times: records and standing types disagree in length");
  }
  std::vector<int> positions;  // 1-based standing indices of type ell
  for (std::size_t j = 0; j < standing_types.size(); ++j) {
    if (standing_types[j] == ell) positions.push_back(static_cast<int>(j) + 1);
  }
  std::vector<std::optional<int>> out;
  if (positions.size() < 2) return out;
  const auto A = coalescence_values(records);
  for (std::size_t r = 0; r + 1 < positions.size(); ++r) {
    out.push_back(pairwise_coalescence(A, positions[r], positions[r + 1]));
  }
  return out;
}

PlanarTree ancestral_tree(const PlanarTree& tree) {
  const std::vector<char> alive = surviving_nodes(tree);
  PlanarTree out(tree.depth());
  std::vector<int> map(tree.size(), -1);
  for (int gen = -tree.depth(); gen <= 0; ++gen) {
    for (int id : tree.generation(gen)) {
      if (!alive[id]) continue;
      const TreeNode& n = tree.node(id);
      map[id] = n.parent < 0 ? out.add_root(n.type) : out.add_child(map[n.parent], n.type);
    }
  }
  return out;
}

void write_tree_tsv(std::ostream& os, const PlanarTree& tree) {
  for (int gen = -tree.depth(); gen <= 0; ++gen) {
    for (int id : tree.generation(gen)) {
      const TreeNode& n = tree.node(id);
      os << n.generation << '\t' << n.index << '\t' << n.type.value << '\t'
         << (n.parent < 0 ? 0 : tree.node(n.parent).index) << '\n';
    }
  }
}

void write_records_csv(std::ostream& os, const std::vector<CoalescentRecord>& records) {
  os << "i,A,mass,censored,lineage\n";
  for (const auto& r : records) {
    os << r.i << ',';
    if (r.A) os << *r.A;
    os << ',' << r.mass << ',' << (r.A ? 0 : 1) << ',' << to_string(r.lineage) << '\n';
  }
}

}  // namespace mtcpp
