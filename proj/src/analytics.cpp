#include "mtcpp/analytics.hpp"

#include "mtcpp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mtcpp {

namespace {

void check_string(int k, const TypeString& a) {
  if (a.empty()) throw DomainError("type string must be nonempty");
  for (TypeIndex t : a) check_type(k, t);
}

// q[n'] = f^(n')(s0), n' = 0..n.
std::vector<Eigen::VectorXd> extinction_path(const ModelSpec& spec, const Eigen::VectorXd& s0,
                                             int n) {
  std::vector<Eigen::VectorXd> q{s0};
  for (int i = 1; i <= n; ++i) q.push_back(pgf_iterate(spec, 1, q.back()));
  return q;
}

double joint_law(const ModelSpec& spec, const TypeString& a,
                 const std::vector<Eigen::VectorXd>& q) {
  const int n = static_cast<int>(a.size()) - 1;
  const double survive = 1.0 - q[n][a[n].zero_based()];
  if (!(survive > kImpossibleEvent)) {
    throw ConditioningError("conditioning on survival from type " +
                            std::to_string(a[n].value) + " over " + std::to_string(n) +
                            " generations, which has probability zero");
  }
  double product = 1.0;
  for (int np = 1; np <= n; ++np) product *= pgf_partial(spec, a[np], a[np - 1], q[np - 1]);
  return product / survive;
}

}  // namespace

double joint_A1_law(const ModelSpec& spec, const TypeString& a) {
  check_string(spec.k(), a);
  const int n = static_cast<int>(a.size()) - 1;
  return joint_law(spec, a, extinction_path(spec, Eigen::VectorXd::Zero(spec.k()), n));
}

double joint_B1_law(const ModelSpec& spec, const TypeString& a, TypeIndex ell) {
  check_string(spec.k(), a);
  check_type(spec.k(), ell);
  if (a.front() != ell) throw DomainError("joint_B1_law: a[0] must equal l");
  const int n = static_cast<int>(a.size()) - 1;
  Eigen::VectorXd s0 = Eigen::VectorXd::Ones(spec.k());
  s0[ell.zero_based()] = 0.0;
  return joint_law(spec, a, extinction_path(spec, s0, n));
}

PopulationLaw conditioned_popsize_law(const ModelSpec& spec, int n, TypeIndex root, int cap) {
  check_type(spec.k(), root);
  if (n < 0) throw DomainError("conditioned_popsize_law: negative n");
  const int k = spec.k();
  auto size_of = [](const Counts& z) { return std::accumulate(z.begin(), z.end(), 0); };

  // Law of the children of a whole generation z, built one parent at a time
  // and memoized across generations.
  std::map<Counts, std::map<Counts, double>> memo;
  memo[Counts(k, 0)] = {{Counts(k, 0), 1.0}};
  std::function<const std::map<Counts, double>&(const Counts&)> children;
  children = [&](const Counts& z) -> const std::map<Counts, double>& {
    if (auto it = memo.find(z); it != memo.end()) return it->second;
    int j = 0;
    while (z[j] == 0) ++j;
    Counts rest = z;
    --rest[j];
    const std::map<Counts, double>& base = children(rest);
    std::map<Counts, double> out;
    for (const auto& [c, q] : base) {
      const int sc = size_of(c);
      for (const PmfRow& row : spec.pmf()[j]) {
        if (sc + size_of(row.counts) > cap) continue;
        Counts next = c;
        for (int t = 0; t < k; ++t) next[t] += row.counts[t];
        out[next] += q * row.p;
      }
    }
    return memo[z] = std::move(out);
  };

  PopulationLaw law;
  Counts start(k, 0);
  start[root.zero_based()] = 1;
  law.pmf[start] = 1.0;
  for (int gen = 0; gen < n; ++gen) {
    std::map<Counts, double> next;
    for (const auto& [z, p] : law.pmf) {
      for (const auto& [c, q] : children(z)) next[c] += p * q;
    }
    law.pmf = std::move(next);
    // Dropped mass never comes back, so fail as soon as it is too large.
    double total = 0.0;
    for (const auto& [z, p] : law.pmf) total += p;
    law.mass_deficit = std::max(0.0, 1.0 - total);
    if (law.mass_deficit >= 1e-10) {
      throw GuardError("conditioned_popsize_law: cap " + std::to_string(cap) +
                       " drops mass " + std::to_string(law.mass_deficit));
    }
  }
  return law;
}

namespace {

// f^(n)(x0) together with the Jacobian of f^(n) at x0.
struct Orbit {
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian;
};

Orbit pgf_orbit(const ModelSpec& spec, int n, Eigen::VectorXd x) {
  const int k = spec.k();
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(k, k);
  for (int step = 0; step < n; ++step) {
    Eigen::MatrixXd Jf(k, k);
    for (int l = 0; l < k; ++l) {
      for (int j = 0; j < k; ++j) {
        Jf(l, j) = pgf_partial(spec, TypeIndex::from_zero(l), TypeIndex::from_zero(j), x);
      }
    }
    J = Jf * J;
    x = pgf_iterate(spec, 1, x);
  }
  return {x, J};
}

}  // namespace

TailValue A1_tail_detail(const ModelSpec& spec, TypeIndex top, int n) {
  check_type(spec.k(), top);
  if (n < 0) throw DomainError("A1_tail: negative n");
  // P(Z = 0) = f(0) and P(Z = e_j) = d_j f(0), both for the n-step pgf.
  const Orbit o = pgf_orbit(spec, n, Eigen::VectorXd::Zero(spec.k()));
  const int t = top.zero_based();
  const double alive = 1.0 - o.value[t];
  if (!(alive > kImpossibleEvent)) {
    throw ConditioningError("A1_tail: survival has probability zero");
  }
  return {o.jacobian.row(t).sum() / alive, 0.0};
}

double A1_tail(const ModelSpec& spec, TypeIndex top, int n) {
  return A1_tail_detail(spec, top, n).value;
}

TailValue B1_tail_detail(const ModelSpec& spec, TypeIndex ell, TypeIndex top, int n) {
  check_type(spec.k(), ell);
  check_type(spec.k(), top);
  if (n < 0) throw DomainError("B1_tail: negative n");
  // Same at s = 1 - e_l, which counts type-l individuals only.
  Eigen::VectorXd x0 = Eigen::VectorXd::Ones(spec.k());
  x0[ell.zero_based()] = 0.0;
  const Orbit o = pgf_orbit(spec, n, x0);
  const int t = top.zero_based();
  const double alive = 1.0 - o.value[t];
  if (!(alive > kImpossibleEvent)) {
    throw ConditioningError("B1_tail: a type-" + std::to_string(ell.value) +
                            " descendant has probability zero");
  }
  return {o.jacobian(t, ell.zero_based()) / alive, 0.0};
}

double B1_tail(const ModelSpec& spec, TypeIndex ell, TypeIndex top, int n) {
  return B1_tail_detail(spec, ell, top, n).value;
}

double oracle_enumerate(const ModelSpec& spec, int n, const EnumerationEvent& event) {
  if (spec.k() > 3 || spec.max_support() > 3 || n > 4) {
    throw GuardError("oracle_enumerate: state space guard (k <= 3, support <= 3, n <= 4)");
  }
  if (n < 0 || static_cast<int>(event.prefix.size()) != n + 1) {
    throw DomainError("oracle_enumerate: prefix must have length n + 1");
  }
  check_string(spec.k(), event.prefix);
  const int k = spec.k();
  const TypeString& a = event.prefix;

  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(k);
  if (event.kind == EnumerationEvent::Kind::B) {
    check_type(k, event.ell);
    if (a.front() != event.ell) return 0.0;
    s0.setOnes();
    s0[event.ell.zero_based()] = 0.0;
  }
  // Extinction weights: a child in generation -(n'-1) leaves no marked
  // descendant in generation 0 with probability q[n'-1].
  std::vector<Eigen::VectorXd> q{s0};
  for (int i = 1; i <= n; ++i) q.push_back(pgf_iterate(spec, 1, q.back()));

  double total = 1.0;
  for (int np = n; np >= 1; --np) {
    const TypeIndex parent = a[np];
    const TypeIndex marked = a[np - 1];
    double level = 0.0;
    for (const PmfRow& row : spec.rows(parent)) {
      if (row.p == 0.0) continue;
      TypeList kids;
      for (int j = 0; j < k; ++j) {
        for (int c = 0; c < row.counts[j]; ++c) kids.push_back(TypeIndex::from_zero(j));
      }
      std::sort(kids.begin(), kids.end());
      // Sum over the distinct orderings, each equally likely.
      double over_orders = 0.0;
      int orders = 0;
      do {
        ++orders;
        for (std::size_t pos = 0; pos < kids.size(); ++pos) {
          if (kids[pos] != marked) continue;
          double w = 1.0;
          for (std::size_t r = 0; r < kids.size(); ++r) {
            if (r != pos) w *= q[np - 1][kids[r].zero_based()];
          }
          over_orders += w;
        }
      } while (std::next_permutation(kids.begin(), kids.end()));
      level += row.p * over_orders / orders;
    }
    total *= level;
  }
  const double survive = 1.0 - q[n][a[n].zero_based()];
  if (!(survive > kImpossibleEvent)) {
    throw ConditioningError("oracle_enumerate: conditioning event has probability zero");
  }
  return total / survive;
}

std::vector<TypeString> all_prefixes(int k, int n, TypeIndex top) {
  check_type(k, top);
  std::vector<TypeString> out;
  TypeString a(n + 1, TypeIndex{1});
  a[n] = top;
  std::function<void(int)> fill = [&](int pos) {
    if (pos == n) {
      out.push_back(a);
      return;
    }
    for (int t = 1; t <= k; ++t) {
      a[pos] = TypeIndex{t};
      fill(pos + 1);
    }
  };
  fill(0);
  return out;
}

IntensityReport intensity_check(const std::function<double(int)>& pA,
                                const std::vector<std::function<double(int)>>& pB,
                                const Eigen::VectorXd& g, int n_max) {
  if (static_cast<Eigen::Index>(pB.size()) != g.size()) {
    throw DomainError("intensity_check: one same-type law per type is needed");
  }
  IntensityReport out;
  const double gmax = g.maxCoeff();
  for (int n = 0; n <= n_max; ++n) {
    const double tail = pA(n);
    const double nuA = 1.0 - tail;
    double sumB = 0.0;
    std::vector<IntensityRow> rows;
    for (int l = 0; l < g.size(); ++l) {
      IntensityRow row;
      row.n = n;
      row.ell = l + 1;
      row.lhs = 1.0 - pB[l](n);
      const double denom = tail + nuA * g[l];
      row.rhs = denom > 0.0 ? nuA * g[l] / denom : 0.0;
      row.nu_A = nuA;
      out.max_identity_error = std::max(out.max_identity_error, std::abs(row.lhs - row.rhs));
      sumB += row.lhs;
      rows.push_back(row);
    }
    const bool applies = tail > 0.0 && tail < 1.0 && gmax < 1.0;
    const bool strict = !applies || sumB < nuA;
    if (!strict) out.subpartition_ok = false;
    for (auto& r : rows) {
      r.sum_B = sumB;
      r.strict = strict;
      out.rows.push_back(r);
    }
  }
  out.pass = out.max_identity_error <= 1e-9 && out.subpartition_ok;
  return out;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

SpineReport spine_decomposition_test(const ModelSpec& spec, TypeIndex root, int n,
                                     std::int64_t samples, Rng& rng) {
  if (n < 1) throw DomainError("spine_decomposition_test: n must be at least 1");
  if (samples < 1) throw DomainError("spine_decomposition_test: samples must be positive");
  check_type(spec.k(), root);
  const int k = spec.k();
  const OffspringLaw law(spec);
  const auto p = law.survival_table(n + 1);
  auto q = [&](int gen, TypeIndex t) { return 1.0 - p[gen][t.zero_based()]; };
  if (!(p[n + 1][root.zero_based()] > kImpossibleEvent)) {
    throw ConditioningError("spine_decomposition_test: root cannot survive n + 1 generations");
  }

  SpineReport report;
  report.n = n;
  report.samples = samples;

  // Joint cells (R, z, ordering).
  std::map<std::pair<int, TypeList>, std::int64_t> cell_counts;
  // Subtree statistics: offspring row of each first-generation child.
  struct Group {
    std::vector<double> counts;
    double size_sum = 0.0;
    double size_sq = 0.0;
    std::int64_t n = 0;
  };
  std::map<std::pair<int, int>, Group> groups;  // (group id, type) -> rows
  auto row_of = [&](TypeIndex t, const Counts& z) {
    const auto& rows = spec.rows(t);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].counts == z) return static_cast<int>(r);
    }
    throw NumericConsistencyError("spine_decomposition_test: offspring vector not in support");
  };

  for (std::int64_t s = 0; s < samples; ++s) {
    StandingSample ss = simulate_standing(law, Ordering::uniform, root, n + 1,
                                          StandingMode::reject, 1, rng);
    report.rejections += ss.rejections;
    const PlanarTree& tree = ss.tree;
    const std::vector<char> alive = surviving_nodes(tree);
    const int r0 = tree.generation(-(n + 1)).front();
    const auto& kids = tree.node(r0).children;
    TypeList order;
    int R = 0;
    for (std::size_t j = 0; j < kids.size(); ++j) {
      order.push_back(tree.node(kids[j]).type);
      if (R == 0 && alive[kids[j]]) R = static_cast<int>(j) + 1;
    }
    if (R == 0) {
      report.structure_ok = false;
      continue;
    }
    ++cell_counts[{R, order}];
    for (std::size_t j = 0; j < kids.size(); ++j) {
      const int pos = static_cast<int>(j) + 1;
      // Left of R: extinct by construction; R: survives.
      if (pos < R && alive[kids[j]]) report.structure_ok = false;
      const int group = pos < R ? 0 : (pos == R ? 1 : 2);
      const TreeNode& child = tree.node(kids[j]);
      Counts z(k, 0);
      for (int c : child.children) ++z[tree.node(c).type.zero_based()];
      Group& g = groups[{group, child.type.value}];
      if (g.counts.empty()) g.counts.assign(spec.rows(child.type).size(), 0.0);
      g.counts[row_of(child.type, z)] += 1.0;
      const double size = static_cast<double>(child.children.size());
      g.size_sum += size;
      g.size_sq += size * size;
      ++g.n;
    }
  }

  // Expected cell probabilities from the product formula.
  const double N = static_cast<double>(samples);
  for (const PmfRow& row : spec.rows(root)) {
    if (row.p == 0.0) continue;
    TypeList kids;
    double perm = 1.0;
    for (int j = 0; j < k; ++j) {
      for (int c = 0; c < row.counts[j]; ++c) kids.push_back(TypeIndex::from_zero(j));
      perm *= factorial(row.counts[j]);
    }
    if (kids.empty()) continue;
    perm /= factorial(static_cast<int>(kids.size()));
    std::sort(kids.begin(), kids.end());
    do {
      double left = 1.0;
      for (std::size_t j = 0; j < kids.size(); ++j) {
        SpineCell cell;
        cell.R = static_cast<int>(j) + 1;
        cell.z = row.counts;
        cell.order = kids;
        cell.expected_p = row.p * perm * p[n][kids[j].zero_based()] * left /
                          p[n + 1][root.zero_based()];
        left *= q(n, kids[j]);
        auto it = cell_counts.find({cell.R, kids});
        cell.observed = it == cell_counts.end() ? 0 : it->second;
        const double freq = cell.observed / N;
        const double se = std::sqrt(cell.expected_p * (1.0 - cell.expected_p) / N);
        if (se > 0.0) {
          cell.z_score = (freq - cell.expected_p) / se;
        } else {
          cell.z_score = freq == cell.expected_p ? 0.0 : INFINITY;
        }
        report.max_abs_z = std::max(report.max_abs_z, std::abs(cell.z_score));
        report.cells.push_back(cell);
      }
    } while (std::next_permutation(kids.begin(), kids.end()));
  }
  std::int64_t covered = 0;
  for (const auto& c : report.cells) covered += c.observed;
  if (covered != samples) report.structure_ok = false;  // a sample fell outside every cell
  report.cells_pass = report.max_abs_z <= 3.0;

  static const char* names[] = {"extinct", "survive", "free"};
  for (const auto& [key, g] : groups) {
    const TypeIndex t{key.second};
    const auto& rows = spec.rows(t);
    std::vector<double> probs(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      double ext = 1.0;  // all children die out within n - 1 generations
      for (int j = 0; j < k; ++j) ext *= std::pow(q(n - 1, TypeIndex::from_zero(j)), rows[r].counts[j]);
      if (key.first == 0) {
        probs[r] = rows[r].p * ext / q(n, t);
      } else if (key.first == 1) {
        probs[r] = rows[r].p * (1.0 - ext) / p[n][t.zero_based()];
      } else {
        probs[r] = rows[r].p;
      }
    }
    const Chi2Result chi = chi2_gof(g.counts, probs);
    double mean = 0.0, second = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double size = std::accumulate(rows[r].counts.begin(), rows[r].counts.end(), 0.0);
      mean += probs[r] * size;
      second += probs[r] * size * size;
    }
    SubtreeTest test;
    test.group = names[key.first];
    test.root_type = t;
    test.chi2 = chi.statistic;
    test.df = chi.df;
    test.p_value = chi.p_value;
    test.pass = chi.pass;
    test.count = g.n;
    test.mean_observed = g.size_sum / static_cast<double>(g.n);
    test.mean_expected = mean;
    test.mean_se = std::sqrt(std::max(0.0, second - mean * mean) / static_cast<double>(g.n));
    if (!test.pass) report.subtrees_pass = false;
    report.subtree_tests.push_back(test);
  }
  return report;
}

}  // namespace mtcpp
