#pragma once

#include "mtcpp/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace mtcpp {

/// One support point of an offspring law: counts[j] children of type j+1.
struct PmfRow {
  std::vector<int> counts;
  double p = 0.0;
};

/// Finite-support multi-type offspring law, one pmf per parent type.
class ModelSpec {
 public:
  ModelSpec() = default;
  /// Validates on construction. `pmf[l]` is the law of a type-(l+1) parent.
  /// Singular laws (every parent has exactly one child a.s.) are rejected
  /// unless `allow_singular` is set.
  ModelSpec(int k, std::vector<std::vector<PmfRow>> pmf,
            std::vector<std::string> names = {}, bool allow_singular = false);

  int k() const { return k_; }
  int max_support() const { return max_support_; }
  const std::vector<PmfRow>& rows(TypeIndex ell) const { return pmf_.at(ell.zero_based()); }
  const std::vector<std::vector<PmfRow>>& pmf() const { return pmf_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  int k_ = 0;
  int max_support_ = 0;
  std::vector<std::vector<PmfRow>> pmf_;
  std::vector<std::string> names_;
};

void check_type(int k, TypeIndex ell);

double pgf_eval(const ModelSpec& spec, TypeIndex ell, const Eigen::VectorXd& s);
/// f^(n)(s); f^(0) is the identity.
Eigen::VectorXd pgf_iterate(const ModelSpec& spec, int n, const Eigen::VectorXd& s);
double pgf_partial(const ModelSpec& spec, TypeIndex ell, TypeIndex wrt,
                   const Eigen::VectorXd& s);
Eigen::MatrixXd mean_matrix(const ModelSpec& spec);
/// p_n = 1 - f^(n)(0).
Eigen::VectorXd survival_vector(const ModelSpec& spec, int n);
/// p_(n,l) = 1 - f^(n)(1 - e_l): probability of a type-l descendant n
/// generations later.
Eigen::VectorXd type_survival_vector(const ModelSpec& spec, int n, TypeIndex ell);

enum class Criticality { sub, critical, super };

const char* to_string(Criticality c);

/// Perron root with right eigenvector u (u.1 = 1) and left eigenvector v
/// (u.v = 1).
template <typename Scalar>
struct SpectralInfo {
  Scalar rho{};
  VectorX<Scalar> u;
  VectorX<Scalar> v;
  Criticality criticality = Criticality::sub;
};

inline constexpr double kCriticalBand = 1e-9;

template <typename Derived>
bool is_positive_regular(const Eigen::MatrixBase<Derived>& M) {
  const Eigen::Index k = M.rows();
  if (k == 0 || M.cols() != k) return false;
  using B = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
  const B pattern = (M.array() > 0).template cast<int>().matrix();
  B power = pattern;
  for (Eigen::Index e = 1; e <= k * k; ++e) {
    if ((power.array() > 0).all()) return true;
    power = ((power * pattern).array() > 0).template cast<int>().matrix();
  }
  return false;
}

namespace detail {

// Dominant eigenpair of a primitive nonnegative matrix by power iteration.
template <typename Scalar>
std::pair<Scalar, VectorX<Scalar>> power_iterate(const MatrixX<Scalar>& A) {
  using std::abs;
  const Eigen::Index k = A.rows();
  VectorX<Scalar> x = VectorX<Scalar>::Constant(k, Scalar(1) / Scalar(k));
  const Scalar tol = Scalar(64) * std::numeric_limits<Scalar>::epsilon();
  for (int it = 0; it < 1000000; ++it) {
    const VectorX<Scalar> y = A * x;
    const Scalar rho = y.sum();  // x sums to one
    if ((y - rho * x).cwiseAbs().maxCoeff() <= tol * rho) return {rho, x};
    x = y / rho;
  }
  throw NumericConsistencyError("perron: power iteration did not converge");
}

}  // namespace detail

template <typename Scalar>
SpectralInfo<Scalar> perron(const MatrixX<Scalar>& M) {
  if (M.rows() != M.cols()) throw DomainError("perron: matrix is not square");
  if ((M.array() < 0).any()) throw DomainError("perron: matrix has negative entries");
  if (!is_positive_regular(M)) throw DomainError("perron: matrix is not positive regular");

  SpectralInfo<Scalar> out;
  auto [rho_right, u] = detail::power_iterate<Scalar>(M);
  auto [rho_left, v] = detail::power_iterate<Scalar>(M.transpose());
  (void)rho_left;
  out.rho = rho_right;
  out.u = u / u.sum();
  out.v = v / out.u.dot(v);
  using std::abs;
  const Scalar gap = out.rho - Scalar(1);
  if (abs(gap) <= Scalar(kCriticalBand)) {
    out.criticality = Criticality::critical;
  } else {
    out.criticality = gap < 0 ? Criticality::sub : Criticality::super;
  }
  return out;
}

}  // namespace mtcpp
