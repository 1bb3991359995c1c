#pragma once

#include "mtcpp/dchain.hpp"
#include "mtcpp/model.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mtcpp {

/// a[0..n]: a[0] is a standing type, a[n] the type of the ancestor in
/// generation -n.
using TypeString = TypeList;

inline constexpr double kImpossibleEvent = 1e-14;

/// P(A_1 > n, lineage types a[0..n-1] | ancestor in generation -n has type a[n]).
double joint_A1_law(const ModelSpec& spec, const TypeString& a);
/// Same-type analogue: the lineage of the leftmost standing type-l
/// individual, with a[0] = l, and no second type-l individual below the
/// generation -n ancestor.
double joint_B1_law(const ModelSpec& spec, const TypeString& a, TypeIndex ell);

using Counts = std::vector<int>;

struct PopulationLaw {
  std::map<Counts, double> pmf;
  double mass_deficit = 0.0;  // mass of states cut off by the size cap
};

/// Law of Z^(n) from one type-`root` individual, states with more than
/// `cap` individuals discarded and accounted for in mass_deficit.
PopulationLaw conditioned_popsize_law(const ModelSpec& spec, int n, TypeIndex root, int cap);

struct TailValue {
  double value = 1.0;
  double mass_deficit = 0.0;
};

/// P(|Z^(n)| = 1 | Z^(n) != 0, Z^(0) = e_top), read off the n-step pgf and
/// its Jacobian at 0. Exact, so mass_deficit is always 0.
TailValue A1_tail_detail(const ModelSpec& spec, TypeIndex top, int n);
double A1_tail(const ModelSpec& spec, TypeIndex top, int n);
/// P(Z^(n)_l = 1 | Z^(n)_l != 0, Z^(0) = e_top), the same at 1 - e_l.
TailValue B1_tail_detail(const ModelSpec& spec, TypeIndex ell, TypeIndex top, int n);
double B1_tail(const ModelSpec& spec, TypeIndex ell, TypeIndex top, int n);

struct EnumerationEvent {
  enum class Kind { A, B } kind = Kind::A;
  TypeString prefix;  // a[0..n]
  TypeIndex ell{1};   // for Kind::B
};

/// Brute-force probability of the event by enumerating offspring vectors and
/// their distinct orderings generation by generation along the marked
/// lineage. Guarded to k <= 3, support <= 3, n <= 4.
double oracle_enumerate(const ModelSpec& spec, int n, const EnumerationEvent& event);

/// All type strings of length n + 1 with a[n] = top.
std::vector<TypeString> all_prefixes(int k, int n, TypeIndex top);

struct IntensityRow {
  int n = 0;
  int ell = 1;
  double lhs = 0;  // nu_B[1..n]
  double rhs = 0;  // nu_A[1..n] g_l / (nu_A[n+1..] + nu_A[1..n] g_l)
  double sum_B = 0;
  double nu_A = 0;
  bool strict = true;  // sum_B < nu_A, checked when 0 < P(A > n) < 1 and max g < 1
};

struct IntensityReport {
  std::vector<IntensityRow> rows;
  double max_identity_error = 0;
  bool subpartition_ok = true;
  bool pass = true;
};

IntensityReport intensity_check(const std::function<double(int)>& pA,
                                const std::vector<std::function<double(int)>>& pB,
                                const Eigen::VectorXd& g, int n_max);

struct SpineCell {
  int R = 1;
  Counts z;
  TypeList order;
  std::int64_t observed = 0;
  double expected_p = 0;
  double z_score = 0;
};

struct SubtreeTest {
  std::string group;  // "extinct", "survive" or "free"
  TypeIndex root_type{1};
  double chi2 = 0;
  int df = 0;
  double p_value = 1;
  bool pass = true;
  std::int64_t count = 0;
  double mean_observed = 0;  // mean offspring count of the subtree roots
  double mean_expected = 0;
  double mean_se = 0;
};

struct SpineReport {
  int n = 0;
  std::int64_t samples = 0;
  std::int64_t rejections = 0;
  std::vector<SpineCell> cells;
  std::vector<SubtreeTest> subtree_tests;
  double max_abs_z = 0;
  bool cells_pass = true;
  bool subtrees_pass = true;
  bool structure_ok = true;
};

/// Checks the conditional independence of subtrees around the first
/// surviving child of a root conditioned to survive n + 1 generations.
SpineReport spine_decomposition_test(const ModelSpec& spec, TypeIndex root, int n,
                                     std::int64_t samples, Rng& rng);

}  // namespace mtcpp
