#pragma once

#include "mtcpp/forest.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mtcpp {

/// Surviving offspring of one ancestor, conditioned on at least one survivor.
struct ZetaSample {
  std::vector<int> counts;  // by type
  TypeList ordered;         // left to right
};

/// Spine sample eta_{n,l}. levels[n'-1] holds the surviving offspring types
/// of the spine ancestor n' generations above generation 0, so levels.back()
/// belongs to the initiating type-l individual and the first entry of
/// levels[n'-1] is the spine ancestor whose offspring fill levels[n'-2].
struct EtaSample {
  std::vector<TypeList> levels;
};

/// D_i: levels[n-1] = D_i(n) for n = 1..T.
struct DState {
  int i = 1;
  std::vector<TypeList> levels;

  int horizon() const { return static_cast<int>(levels.size()); }
  TypeIndex standing_type() const { return levels.front().front(); }
  /// min{n : |D_i(n)| >= 2}, empty when every level is a singleton.
  std::optional<int> coalescence() const;

  friend bool operator==(const DState&, const DState&) = default;
};

/// Law and survival tables shared by the chain samplers.
class DChainModel {
 public:
  DChainModel(OffspringLaw law, Ordering ordering, int horizon);

  const OffspringLaw& law() const { return law_; }
  Ordering ordering() const { return ordering_; }
  int horizon() const { return horizon_; }
  /// p_n, n = 0..horizon.
  const Eigen::VectorXd& survival(int n) const { return survival_.at(n); }

 private:
  OffspringLaw law_;
  Ordering ordering_;
  int horizon_;
  std::vector<Eigen::VectorXd> survival_;
};

inline constexpr std::int64_t kZetaRejectionCap = 1'000'000;

ZetaSample sample_zeta(const DChainModel& model, int n, TypeIndex ell, Rng& rng);
EtaSample sample_eta(const DChainModel& model, int n, TypeIndex ell, Rng& rng);

struct StepResult {
  DState next;
  int A = 0;
  TypeList lineage;  // first entries of next.levels[0..A-1]
};

/// One transition of the chain; empty when A_i is censored at the horizon.
std::optional<StepResult> dchain_step(const DChainModel& model, const DState& state, Rng& rng);

enum class InitMode {
  rejection,          // D_1 of the leftmost individual of a surviving forward tree
  conditioned_spine,  // D_1 = eta_{T, root}
  sizebiased_spine,   // size-biased originating individual, eta below it
};

const char* to_string(InitMode mode);
InitMode parse_init_mode(const std::string& name);

/// For sizebiased_spine the model must have rho <= 1 and `biased` holds the
/// size-biased law (see size_biased_spec).
DState init_quasistationary(const DChainModel& model, InitMode mode, TypeIndex root_type,
                            Rng& rng, const ModelSpec* biased = nullptr);

/// P^(z | l) = P(z | l) (z.u) / (rho u_l), u the right Perron vector.
ModelSpec size_biased_spec(const ModelSpec& spec);

/// D_1, ..., D_W of the standing population of a forest.
std::vector<DState> extract_dstates(const PlanarTree& tree);

/// Inverse of extract_dstates. A new tree starts after every state whose
/// coalescence is censored; `root_types` lists the root of each tree.
PlanarTree reconstruct_tree(const std::vector<DState>& states, const TypeList& root_types);

void write_dstate_json(std::ostream& os, const DState& state);

}  // namespace mtcpp
