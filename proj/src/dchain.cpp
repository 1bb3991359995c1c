#include "mtcpp/dchain.hpp"

#include <json.hpp>

#include <ostream>

namespace mtcpp {

std::optional<int> DState::coalescence() const {
  for (std::size_t n = 0; n < levels.size(); ++n) {
    if (levels[n].size() >= 2) return static_cast<int>(n) + 1;
  }
  return std::nullopt;
}

DChainModel::DChainModel(OffspringLaw law, Ordering ordering, int horizon)
    : law_(std::move(law)), ordering_(ordering), horizon_(horizon) {
  if (horizon_ < 1) throw DomainError("dchain: horizon must be at least 1");
  if (ordering_ == Ordering::lf_first && !law_.is_lf()) {
    throw DomainError("dchain: lf_first ordering requires linear-fractional parameters");
  }
  survival_ = law_.survival_table(horizon_);
}

ZetaSample sample_zeta(const DChainModel& model, int n, TypeIndex ell, Rng& rng) {
  if (n < 1 || n > model.horizon()) throw DomainError("sample_zeta: n outside 1..T");
  check_type(model.law().k(), ell);
  if (!(model.survival(n)[ell.zero_based()] > 1e-14)) {
    throw ConditioningError("sample_zeta: type " + std::to_string(ell.value) +
                            " cannot survive " + std::to_string(n) + " generations");
  }
  const Eigen::VectorXd& p = model.survival(n - 1);
  ZetaSample out;
  for (std::int64_t attempt = 0; attempt < kZetaRejectionCap; ++attempt) {
    const TypeList children = model.law().sample(ell, model.ordering(), rng);
    out.ordered.clear();
    for (TypeIndex t : children) {
      const double keep = p[t.zero_based()];
      if (keep >= 1.0 || rng.bernoulli(keep)) out.ordered.push_back(t);
    }
    if (!out.ordered.empty()) {
      out.counts.assign(model.law().k(), 0);
      for (TypeIndex t : out.ordered) ++out.counts[t.zero_based()];
      return out;
    }
  }
  throw GuardError("sample_zeta: rejection cap exceeded");
}

EtaSample sample_eta(const DChainModel& model, int n, TypeIndex ell, Rng& rng) {
  if (n < 1) throw DomainError("sample_eta: n must be at least 1");
  EtaSample out;
  out.levels.resize(n);
  TypeIndex parent = ell;
  for (int level = n; level >= 1; --level) {
    out.levels[level - 1] = sample_zeta(model, level, parent, rng).ordered;
    parent = out.levels[level - 1].front();
  }
  return out;
}

std::optional<StepResult> dchain_step(const DChainModel& model, const DState& state, Rng& rng) {
  const std::optional<int> A = state.coalescence();
  if (!A) return std::nullopt;
  StepResult out;
  out.A = *A;
  out.next.i = state.i + 1;
  out.next.levels.resize(state.levels.size());
  for (std::size_t n = *A; n < state.levels.size(); ++n) out.next.levels[n] = state.levels[n];
  const TypeList& mrca = state.levels[*A - 1];
  out.next.levels[*A - 1].assign(mrca.begin() + 1, mrca.end());
  if (*A > 1) {
    EtaSample eta = sample_eta(model, *A - 1, mrca[1], rng);
    for (int n = 0; n < *A - 1; ++n) out.next.levels[n] = std::move(eta.levels[n]);
  }
  for (int n = 0; n < *A; ++n) out.lineage.push_back(out.next.levels[n].front());
  return out;
}

const char* to_string(InitMode mode) {
  switch (mode) {
    case InitMode::rejection: return "rejection";
    case InitMode::conditioned_spine: return "conditioned_spine";
    case InitMode::sizebiased_spine: return "sizebiased_spine";
  }
  return "unknown";
}

InitMode parse_init_mode(const std::string& name) {
  if (name == "rejection") return InitMode::rejection;
  if (name == "conditioned_spine") return InitMode::conditioned_spine;
  if (name == "sizebiased_spine") return InitMode::sizebiased_spine;
  throw SchemaError("unknown init mode '" + name + "'");
}

namespace {

// D_i for the standing individual with node id `leaf`.
DState dstate_of(const PlanarTree& tree, const std::vector<char>& alive, int leaf, int i) {
  DState d;
  d.i = i;
  int child = leaf;
  for (int n = 1; n <= tree.depth(); ++n) {
    const int parent = tree.node(child).parent;
    const auto& ch = tree.node(parent).children;
    TypeList level;
    bool started = false;
    for (int c : ch) {
      started = started || c == child;
      if (started && alive[c]) level.push_back(tree.node(c).type);
    }
    d.levels.push_back(std::move(level));
    child = parent;
  }
  return d;
}

}  // namespace

ModelSpec size_biased_spec(const ModelSpec& spec) {
  const auto info = perron<double>(mean_matrix(spec));
  if (info.rho > 1.0 + kCriticalBand) {
    throw DomainError("size-biased law needs rho <= 1, got rho = " + std::to_string(info.rho));
  }
  std::vector<std::vector<PmfRow>> pmf(spec.k());
  for (int l = 0; l < spec.k(); ++l) {
    for (const PmfRow& row : spec.pmf()[l]) {
      double zu = 0.0;
      for (int j = 0; j < spec.k(); ++j) zu += row.counts[j] * info.u[j];
      const double q = row.p * zu / (info.rho * info.u[l]);
      if (q > 0.0) pmf[l].push_back({row.counts, q});
    }
    // Rows sum to one up to the eigenvector residual.
    double total = 0.0;
    for (const PmfRow& r : pmf[l]) total += r.p;
    for (PmfRow& r : pmf[l]) r.p /= total;
  }
  return ModelSpec(spec.k(), std::move(pmf), spec.names(), true);
}

DState init_quasistationary(const DChainModel& model, InitMode mode, TypeIndex root_type,
                            Rng& rng, const ModelSpec* biased) {
  const int T = model.horizon();
  check_type(model.law().k(), root_type);
  switch (mode) {
    case InitMode::rejection: {
      const StandingSample s = simulate_standing(model.law(), model.ordering(), root_type, T,
                                                 StandingMode::reject, 1, rng);
      const std::vector<char> alive = surviving_nodes(s.tree);
      return dstate_of(s.tree, alive, s.tree.generation(0).front(), 1);
    }
    case InitMode::conditioned_spine:
      return DState{1, sample_eta(model, T, root_type, rng).levels};
    case InitMode::sizebiased_spine: {
      if (biased == nullptr) throw DomainError("sizebiased_spine: size-biased law missing");
      const auto info = perron<double>(model.law().mean_matrix());
      if (info.rho > 1.0 + kCriticalBand) {
        throw DomainError("sizebiased_spine: requires rho <= 1, got rho = " +
                          std::to_string(info.rho));
      }
      const OffspringLaw top_law(*biased);
      const TypeList children = top_law.sample(root_type, Ordering::uniform, rng);
      std::vector<double> w;
      for (TypeIndex t : children) w.push_back(info.u[t.zero_based()]);
      const std::size_t spine = rng.categorical(w);
      TypeList top{children[spine]};
      const Eigen::VectorXd& p = model.survival(T - 1);
      for (std::size_t j = spine + 1; j < children.size(); ++j) {
        if (rng.bernoulli(p[children[j].zero_based()])) top.push_back(children[j]);
      }
      DState d;
      d.i = 1;
      if (T > 1) d.levels = sample_eta(model, T - 1, top.front(), rng).levels;
      d.levels.push_back(std::move(top));
      return d;
    }
  }
  throw DomainError("init_quasistationary: unknown mode");
}

std::vector<DState> extract_dstates(const PlanarTree& tree) {
  const std::vector<char> alive = surviving_nodes(tree);
  std::vector<DState> out;
  int i = 1;
  for (int leaf : tree.generation(0)) out.push_back(dstate_of(tree, alive, leaf, i++));
  return out;
}

PlanarTree reconstruct_tree(const std::vector<DState>& states, const TypeList& root_types) {
  if (states.empty()) throw DomainError("reconstruct_tree: no states");
  const int T = states.front().horizon();
  PlanarTree out(T);
  std::vector<int> anc(T + 1, -1);  // anc[n]: ancestor in generation -n on the current lineage
  std::vector<std::size_t> pos(T + 1, 0);  // index of anc[n-1] among the children of anc[n]
  std::size_t next_root = 0;
  bool fresh = true;

  auto grow = [&](const DState& d, int from) {
    for (int n = from; n >= 1; --n) {
      for (TypeIndex t : d.levels[n - 1]) out.add_child(anc[n], t);
      pos[n] = 0;
      anc[n - 1] = out.node(anc[n]).children.front();
    }
  };

  for (std::size_t s = 0; s < states.size(); ++s) {
    const DState& d = states[s];
    if (d.horizon() != T) throw NumericConsistencyError("reconstruct_tree: horizon mismatch");
    for (const auto& level : d.levels) {
      if (level.empty()) throw NumericConsistencyError("reconstruct_tree: empty level");
    }
    if (fresh) {
      if (next_root >= root_types.size()) {
        throw NumericConsistencyError("reconstruct_tree: more trees than root types");
      }
      anc[T] = out.add_root(root_types[next_root++]);
      grow(d, T);
      fresh = false;
    } else {
      const DState& prev = states[s - 1];
      const int A = *prev.coalescence();
      for (int n = A + 1; n <= T; ++n) {
        if (d.levels[n - 1] != prev.levels[n - 1]) {
          throw NumericConsistencyError("reconstruct_tree: level above the MRCA changed");
        }
      }
      const TypeList& mrca = prev.levels[A - 1];
      if (d.levels[A - 1] != TypeList(mrca.begin() + 1, mrca.end())) {
        throw NumericConsistencyError("reconstruct_tree: MRCA level is not a left shift");
      }
      ++pos[A];
      anc[A - 1] = out.node(anc[A]).children.at(pos[A]);
      grow(d, A - 1);
    }
    if (!d.coalescence()) fresh = true;
  }
  if (!fresh) throw NumericConsistencyError("reconstruct_tree: last state is not terminal");
  if (next_root != root_types.size()) {
    throw NumericConsistencyError("reconstruct_tree: fewer trees than root types");
  }
  out.reindex();
  return out;
}

void write_dstate_json(std::ostream& os, const DState& state) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& level : state.levels) {
    nlohmann::json row = nlohmann::json::array();
    for (TypeIndex t : level) row.push_back(t.value);
    levels.push_back(std::move(row));
  }
  nlohmann::json j{{"i", state.i}, {"T", state.horizon()}, {"levels", std::move(levels)}};
  os << j.dump() << '\n';
}

}  // namespace mtcpp
