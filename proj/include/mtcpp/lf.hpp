#pragma once

#include "mtcpp/model.hpp"
#include "mtcpp/rng.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace mtcpp {

/// Linear-fractional offspring law LF(h_l, g, m): with probability h_l0 no
/// children, otherwise one child of type j with probability h_lj followed by
/// a Geometric(mean m) number of i.i.d. g-distributed children.
template <typename Scalar>
struct LFParams {
  MatrixX<Scalar> H;
  VectorX<Scalar> g;
  Scalar m{};

  int k() const { return static_cast<int>(g.size()); }
  VectorX<Scalar> h0() const {
    return (VectorX<Scalar>::Ones(k()) - H.rowwise().sum()).cwiseMax(Scalar(0));
  }

  template <typename T>
  LFParams<T> cast() const {
    return LFParams<T>{H.template cast<T>(), g.template cast<T>(), static_cast<T>(m)};
  }
};

using LF = LFParams<double>;

template <typename Scalar>
void validate(const LFParams<Scalar>& p) {
  const int k = p.k();
  if (k < 1) throw SchemaError("lf: k must be at least 1");
  if (p.H.rows() != k || p.H.cols() != k) throw SchemaError("lf: H must be k x k");
  if (!(p.m > Scalar(0)) || !std::isfinite(static_cast<double>(p.m))) {
    throw SchemaError("lf: m must be positive");
  }
  if ((p.H.array() < Scalar(0)).any()) throw SchemaError("lf: H has negative entries");
  if ((p.g.array() < Scalar(0)).any()) throw SchemaError("lf: g has negative entries");
  for (int l = 0; l < k; ++l) {
    if (p.H.row(l).sum() > Scalar(1.0 + 1e-12)) {
      throw SchemaError("lf: row " + std::to_string(l + 1) + " of H sums above 1");
    }
  }
  using std::abs;
  if (abs(p.g.sum() - Scalar(1)) > Scalar(1e-12)) throw SchemaError("lf: g must sum to 1");
}

/// M = H + m H 1^t g.
template <typename Scalar>
MatrixX<Scalar> lf_mean_matrix(const LFParams<Scalar>& p) {
  const VectorX<Scalar> r = p.H.rowwise().sum();
  return p.H + p.m * r * p.g.transpose();
}

template <typename Scalar>
Scalar lf_pgf(const LFParams<Scalar>& p, TypeIndex ell, const VectorX<Scalar>& s) {
  check_type(p.k(), ell);
  if (s.size() != p.k()) throw DomainError("lf_pgf: dimension mismatch");
  if ((s.array() < Scalar(0)).any() || (s.array() > Scalar(1)).any()) {
    throw DomainError("lf_pgf: argument outside [0,1]^k");
  }
  const int l = ell.zero_based();
  const Scalar denom = Scalar(1) + p.m - p.m * p.g.dot(s);
  if (!(denom > Scalar(0))) throw DomainError("lf_pgf: nonpositive denominator");
  return p.h0()[l] + p.H.row(l).dot(s) / denom;
}

/// Parameters (H^(n), g^(n), m^(n)) of the n-step law, which is again
/// linear-fractional. n = 0 uses m_0 = 0, g_0 = g, H_0 = I.
template <typename Scalar>
struct LFIterates {
  int n = 0;
  Scalar m_n{};
  VectorX<Scalar> g_n;
  MatrixX<Scalar> H_n;
  VectorX<Scalar> h0_n;

  LFParams<Scalar> params() const { return LFParams<Scalar>{H_n, g_n, m_n}; }
};

template <typename Scalar>
std::vector<LFIterates<Scalar>> lf_iterate_all(const LFParams<Scalar>& p, int n_max) {
  if (n_max < 0) throw DomainError("lf_iterate: negative n");
  const int k = p.k();
  const MatrixX<Scalar> M = lf_mean_matrix(p);

  std::vector<LFIterates<Scalar>> out;
  out.reserve(n_max + 1);
  out.push_back({0, Scalar(0), p.g, MatrixX<Scalar>::Identity(k, k), VectorX<Scalar>::Zero(k)});

  // m^(n) and g^(n) come from the running sum g (I + ... + M^(n-1)). H^(n)
  // and h0^(n) follow from composing f^(n-1) with f, which only adds
  // nonnegative terms; the direct formula M^n - c M^n 1 g^(n) cancels badly
  // once M^n is large.
  const VectorX<Scalar> h0 = p.h0();
  MatrixX<Scalar> power = MatrixX<Scalar>::Identity(k, k);  // M^(n-1)
  RowVectorX<Scalar> gS = RowVectorX<Scalar>::Zero(k);     // g (I + ... + M^(n-1))
  for (int n = 1; n <= n_max; ++n) {
    const LFIterates<Scalar>& prev = out.back();
    gS += p.g.transpose() * power;
    power = power * M;
    LFIterates<Scalar> it;
    it.n = n;
    it.m_n = p.m * gS.sum();
    it.g_n = (p.m / it.m_n) * gS.transpose();
    const Scalar alpha = Scalar(1) + prev.m_n * (Scalar(1) - prev.g_n.dot(h0));
    const Scalar a = alpha * (Scalar(1) + p.m);
    const MatrixX<Scalar> mid = MatrixX<Scalar>::Identity(k, k) +
                                (prev.m_n / alpha) * h0 * prev.g_n.transpose();
    it.H_n = (prev.H_n * mid * p.H) * ((Scalar(1) + it.m_n) / a);
    it.h0_n = prev.h0_n + prev.H_n * h0 / alpha;
    out.push_back(std::move(it));
  }
  return out;
}

template <typename Scalar>
LFIterates<Scalar> lf_iterate(const LFParams<Scalar>& p, int n) {
  return lf_iterate_all(p, n).back();
}

/// The same tail computed along two independent routes.
template <typename Scalar>
struct DualForm {
  Scalar product{};
  Scalar closed{};
};

inline constexpr double kDualFormTolerance = 1e-9;

/// P(A_1 > n) for n = 0..n_max, as the product over generations and as
/// 1 / (1 + m^(n)).
template <typename Scalar>
std::vector<DualForm<Scalar>> lf_coalescence_forms(const LFParams<Scalar>& p, int n_max) {
  const auto its = lf_iterate_all(p, n_max);
  std::vector<DualForm<Scalar>> out;
  Scalar product = 1;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      const Scalar x = p.g.dot(its[n - 1].h0_n);
      product /= Scalar(1) + p.m - p.m * x;
    }
    out.push_back({product, Scalar(1) / (Scalar(1) + its[n].m_n)});
  }
  return out;
}

/// P(B_l,1 > n | standing type l) for n = 0..n_max via the product of
/// no-type-l-descendant probabilities and via 1 / (1 + m^(n) g^(n)_l).
template <typename Scalar>
std::vector<DualForm<Scalar>> lf_sametype_forms(const LFParams<Scalar>& p, TypeIndex ell,
                                                int n_max) {
  check_type(p.k(), ell);
  const int l = ell.zero_based();
  const int k = p.k();
  const auto its = lf_iterate_all(p, n_max);
  std::vector<DualForm<Scalar>> out;
  Scalar product = 1;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) {
      const auto& prev = its[n - 1];
      VectorX<Scalar> tilde(k);
      if (n == 1) {
        tilde.setOnes();
        tilde[l] = 0;
      } else {
        const Scalar d = Scalar(1) + prev.m_n * prev.g_n[l];
        for (int j = 0; j < k; ++j) {
          tilde[j] = prev.h0_n[j] + (Scalar(1) - prev.h0_n[j] - prev.H_n(j, l)) / d;
        }
      }
      product /= Scalar(1) + p.m - p.m * p.g.dot(tilde);
    }
    out.push_back({product, Scalar(1) / (Scalar(1) + its[n].m_n * its[n].g_n[l])});
  }
  return out;
}

namespace detail {

template <typename Scalar>
Scalar checked_closed(const DualForm<Scalar>& f, const char* who, int n) {
  using std::abs;
  if (!(abs(f.product - f.closed) <= Scalar(kDualFormTolerance))) {
    throw NumericConsistencyError(std::string(who) + ": product and closed forms disagree at n=" +
                                  std::to_string(n));
  }
  return f.closed;
}

}  // namespace detail

template <typename Scalar>
Scalar lf_coalescence_law(const LFParams<Scalar>& p, int n) {
  return detail::checked_closed(lf_coalescence_forms(p, n).back(), "lf_coalescence_law", n);
}

template <typename Scalar>
Scalar lf_sametype_law(const LFParams<Scalar>& p, TypeIndex ell, int n) {
  return detail::checked_closed(lf_sametype_forms(p, ell, n).back(), "lf_sametype_law", n);
}

/// Tails for the type-free case H = (1 - h0) 1^t g, where every parent has
/// the same offspring law.
struct TypeFreeLaws {
  double pA = 1.0;
  double pB = 1.0;
};

TypeFreeLaws lf_typefree_laws(double h0, double m, const Eigen::VectorXd& g, TypeIndex ell,
                              int n);

/// The LF parameters H = (1 - h0) 1^t g, m, g.
LF typefree_params(double h0, double m, const Eigen::VectorXd& g);

/// Finite-support version of an LF law, with the geometric count of
/// g-children cut at `truncate_at` and the remaining mass renormalized.
ModelSpec lf_to_modelspec(const LF& p, int truncate_at);
/// Smallest cut for which the discarded geometric mass is below `budget`.
int lf_truncation_for(const LF& p, double budget = 1e-10);

/// Ordered offspring types: the h-child (if any) first, then the g-children.
TypeList lf_sample_offspring(const LF& p, TypeIndex ell, Rng& rng);

// Two-type symmetric / asymmetric comparison.

struct TwoTypeModels {
  LF symmetric;
  LF asymmetric;
};

TwoTypeModels two_type_models(double g, double p, double h1, double m);

/// Polynomial G(x) for the n-step type weights (n >= 1):
/// g_a^(n) = (g G(p), 1 - g G(p)) and g_s^(n)_1 = (g - 1/2) G(2p - 1) + 1/2.
double two_type_G(double x, int n, double h1, double m);

struct TwoTypeRow {
  int n = 0;
  double pA_s = 1, pA_a = 1;
  double pB1_s = 1, pB1_a = 1;
  double pB2_s = 1, pB2_a = 1;
  double G0 = 0, G1 = 0;  // G(0), G(1); only meaningful for n >= 1
  double closed_form_error = 0;  // max deviation of closed forms from the iteration
};

struct TwoTypeComparison {
  double g = 0, p = 0, h1 = 0, m = 0;
  std::vector<TwoTypeRow> rows;
};

/// Tails of both models for n = 0..n_max. Throws NumericConsistencyError if
/// the closed forms for m^(n), g_a^(n), g_s^(n) deviate from the iteration by
/// more than 1e-9.
TwoTypeComparison two_type_compare(double g, double p, double h1, double m, int n_max);

}  // namespace mtcpp
