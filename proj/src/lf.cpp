#include "mtcpp/lf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mtcpp {

LF typefree_params(double h0, double m, const Eigen::VectorXd& g) {
  const int k = static_cast<int>(g.size());
  LF p{(1.0 - h0) * Eigen::VectorXd::Ones(k) * g.transpose(), g, m};
  validate(p);
  return p;
}

TypeFreeLaws lf_typefree_laws(double h0, double m, const Eigen::VectorXd& g, TypeIndex ell,
                              int n) {
  if (!(h0 > 0.0 && h0 < 1.0)) throw DomainError("lf_typefree_laws: h0 must lie in (0,1)");
  if (!(m > 0.0)) throw DomainError("lf_typefree_laws: m must be positive");
  if (n < 0) throw DomainError("lf_typefree_laws: negative n");
  if ((g.array() < 0).any() || std::abs(g.sum() - 1.0) > 1e-12) {
    throw DomainError("lf_typefree_laws: g is not a probability vector");
  }
  check_type(static_cast<int>(g.size()), ell);

  TypeFreeLaws out;
  if (n == 0) return out;
  const double c = (1.0 - h0) * (1.0 + m);
  if (std::abs(c - 1.0) <= 1e-12) {
    out.pA = (1.0 - h0) / (1.0 - h0 + n * h0);
  } else {
    out.pA = (m - h0 * (1.0 + m)) /
             (m * std::pow(1.0 + m, n) * std::pow(1.0 - h0, n) - h0 * (1.0 + m));
  }
  const double gl = g[ell.zero_based()];
  out.pB = out.pA / (out.pA + gl * (1.0 - out.pA));
  return out;
}

int lf_truncation_for(const LF& p, double budget) {
  validate(p);
  // P(G > t) = r^(t+1) for the geometric count G.
  const double r = p.m / (1.0 + p.m);
  const double t = std::ceil(std::log(budget) / std::log(r)) - 1.0;
  return std::max(0, static_cast<int>(t));
}

ModelSpec lf_to_modelspec(const LF& p, int truncate_at) {
  validate(p);
  if (truncate_at < 0) throw DomainError("lf_to_modelspec: negative truncation");
  const int k = p.k();
  const double r = p.m / (1.0 + p.m);
  const double tail = std::pow(r, truncate_at + 1);
  if (tail >= 1e-10) {
    throw DomainError("lf_to_modelspec: truncation at " + std::to_string(truncate_at) +
                      " leaves mass " + std::to_string(tail));
  }

  // Law of the type counts of j i.i.d. g-children, built by repeated
  // convolution with g.
  using Counts = std::vector<int>;
  std::vector<std::map<Counts, double>> of_size(truncate_at + 1);
  of_size[0][Counts(k, 0)] = 1.0;
  for (int j = 1; j <= truncate_at; ++j) {
    for (const auto& [c, q] : of_size[j - 1]) {
      for (int t = 0; t < k; ++t) {
        if (p.g[t] == 0.0) continue;
        Counts next = c;
        ++next[t];
        of_size[j][next] += q * p.g[t];
      }
    }
  }

  const Eigen::VectorXd h0 = p.h0();
  std::vector<std::vector<PmfRow>> pmf(k);
  for (int l = 0; l < k; ++l) {
    std::map<Counts, double> law;
    if (h0[l] > 0.0) law[Counts(k, 0)] += h0[l];
    for (int first = 0; first < k; ++first) {
      const double hf = p.H(l, first);
      if (hf == 0.0) continue;
      double geo = 1.0 / (1.0 + p.m);
      for (int j = 0; j <= truncate_at; ++j, geo *= r) {
        for (const auto& [c, q] : of_size[j]) {
          Counts z = c;
          ++z[first];
          law[z] += hf * geo * q;
        }
      }
    }
    double total = 0.0;
    for (const auto& [z, q] : law) total += q;
    for (const auto& [z, q] : law) {
      if (q > 0.0) pmf[l].push_back({z, q / total});
    }
  }
  return ModelSpec(k, std::move(pmf));
}

TypeList lf_sample_offspring(const LF& p, TypeIndex ell, Rng& rng) {
  check_type(p.k(), ell);
  const int l = ell.zero_based();
  const int k = p.k();
  std::vector<double> first(k + 1);
  first[0] = std::max(0.0, 1.0 - p.H.row(l).sum());
  for (int j = 0; j < k; ++j) first[j + 1] = p.H(l, j);
  const std::size_t pick = rng.categorical(first);
  TypeList out;
  if (pick == 0) return out;
  out.push_back(TypeIndex::from_zero(static_cast<int>(pick) - 1));
  const std::int64_t extra = rng.geometric(p.m);
  const std::vector<double> g(p.g.data(), p.g.data() + k);
  for (std::int64_t i = 0; i < extra; ++i) {
    out.push_back(TypeIndex::from_zero(static_cast<int>(rng.categorical(g))));
  }
  return out;
}

TwoTypeModels two_type_models(double g, double p, double h1, double m) {
  if (!(g >= 0.0 && g <= 0.5)) throw DomainError("two_type_models: g must lie in [0, 0.5]");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("two_type_models: p must lie in (0, 1]");
  if (!(h1 >= 0.0 && h1 <= 1.0)) throw DomainError("two_type_models: h1 must lie in [0, 1]");
  if (!(m > 0.0)) throw DomainError("two_type_models: m must be positive");
  Eigen::Vector2d gv(g, 1.0 - g);
  Eigen::Matrix2d Hs, Ha;
  Hs << p, 1.0 - p, 1.0 - p, p;
  Ha << p, 1.0 - p, 0.0, 1.0;
  TwoTypeModels out{LF{h1 * Hs, gv, m}, LF{h1 * Ha, gv, m}};
  validate(out.symmetric);
  validate(out.asymmetric);
  return out;
}

double two_type_G(double x, int n, double h1, double m) {
  if (n < 1) throw DomainError("two_type_G: n must be at least 1");
  const double c = h1 * (1.0 + m);
  double denom = 0.0;
  for (int j = 0; j < n; ++j) denom += std::pow(c, j);

  double numer = std::pow(h1, n - 1) * std::pow(x, n - 1);
  for (int np = 0; np <= n - 2; ++np) {
    double coeff = (h1 * m + 1.0) * std::pow(h1, np);
    for (int i = 1; i <= n - np - 2; ++i) {
      coeff += m * std::pow(1.0 + m, i) * std::pow(h1, i + np + 1);
    }
    numer += coeff * std::pow(x, np);
  }
  return numer / denom;
}

TwoTypeComparison two_type_compare(double g, double p, double h1, double m, int n_max) {
  const TwoTypeModels models = two_type_models(g, p, h1, m);
  const auto its_s = lf_iterate_all(models.symmetric, n_max);
  const auto its_a = lf_iterate_all(models.asymmetric, n_max);
  const auto A_s = lf_coalescence_forms(models.symmetric, n_max);
  const auto A_a = lf_coalescence_forms(models.asymmetric, n_max);
  const auto B1_s = lf_sametype_forms(models.symmetric, TypeIndex{1}, n_max);
  const auto B1_a = lf_sametype_forms(models.asymmetric, TypeIndex{1}, n_max);
  const auto B2_s = lf_sametype_forms(models.symmetric, TypeIndex{2}, n_max);
  const auto B2_a = lf_sametype_forms(models.asymmetric, TypeIndex{2}, n_max);

  TwoTypeComparison out{g, p, h1, m, {}};
  const double c = h1 * (1.0 + m);
  for (int n = 0; n <= n_max; ++n) {
    TwoTypeRow row;
    row.n = n;
    row.pA_s = detail::checked_closed(A_s[n], "two_type_compare", n);
    row.pA_a = detail::checked_closed(A_a[n], "two_type_compare", n);
    row.pB1_s = detail::checked_closed(B1_s[n], "two_type_compare", n);
    row.pB1_a = detail::checked_closed(B1_a[n], "two_type_compare", n);
    row.pB2_s = detail::checked_closed(B2_s[n], "two_type_compare", n);
    row.pB2_a = detail::checked_closed(B2_a[n], "two_type_compare", n);
    if (n >= 1) {
      double geometric = 0.0;
      for (int j = 0; j < n; ++j) geometric += std::pow(c, j);
      const double m_closed = m * geometric;
      const double ga1 = g * two_type_G(p, n, h1, m);
      const double gs1 = (g - 0.5) * two_type_G(2.0 * p - 1.0, n, h1, m) + 0.5;
      row.G0 = two_type_G(0.0, n, h1, m);
      row.G1 = two_type_G(1.0, n, h1, m);
      const double scale = std::max(1.0, m_closed);
      double err = std::abs(m_closed - its_s[n].m_n) / scale;
      err = std::max(err, std::abs(m_closed - its_a[n].m_n) / scale);
      err = std::max(err, std::abs(ga1 - its_a[n].g_n[0]));
      err = std::max(err, std::abs(1.0 - ga1 - its_a[n].g_n[1]));
      err = std::max(err, std::abs(gs1 - its_s[n].g_n[0]));
      err = std::max(err, std::abs(1.0 - gs1 - its_s[n].g_n[1]));
      row.closed_form_error = err;
      if (!(err <= 1e-9)) {
        throw NumericConsistencyError("two_type_compare: closed forms disagree with the "
                                      "iteration at n=" + std::to_string(n));
      }
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace mtcpp
