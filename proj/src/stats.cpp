#include "mtcpp/stats.hpp"

#include "mtcpp/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mtcpp {

namespace {

// Series for the lower regularized gamma P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_sf(double x, int df) {
  if (df <= 0) return x > 0.0 ? 0.0 : 1.0;
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * x);
}

KsResult ks_compare(const std::vector<int>& a, const std::vector<int>& b, double alpha) {
  if (a.empty() || b.empty()) throw DomainError("ks_compare: empty sample");
  std::vector<int> x = a, y = b;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    int v;
    if (j >= y.size() || (i < x.size() && x[i] <= y[j])) {
      v = x[i];
    } else {
      v = y[j];
    }
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  KsResult out;
  out.distance = d;
  out.critical = std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((nx + ny) / (nx * ny));
  out.pass = d <= out.critical;
  return out;
}

Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                    double alpha) {
  if (observed.size() != probs.size()) throw DomainError("chi2_gof: size mismatch");
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  Chi2Result out;
  if (total <= 0.0) return out;
  std::vector<double> obs, exp;
  double pool_obs = 0.0, pool_exp = 0.0;
  for (std::size_t c = 0; c < observed.size(); ++c) {
    const double e = probs[c] * total;
    if (probs[c] <= 0.0) {
      if (observed[c] > 0.0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        out.pass = false;
        return out;
      }
      continue;
    }
    if (e < 5.0) {
      pool_obs += observed[c];
      pool_exp += e;
    } else {
      obs.push_back(observed[c]);
      exp.push_back(e);
    }
  }
  if (pool_exp > 0.0) {
    if (pool_exp < 5.0 && !exp.empty()) {
      const auto smallest = std::min_element(exp.begin(), exp.end()) - exp.begin();
      obs[smallest] += pool_obs;
      exp[smallest] += pool_exp;
    } else {
      obs.push_back(pool_obs);
      exp.push_back(pool_exp);
    }
  }
  for (std::size_t c = 0; c < obs.size(); ++c) {
    out.statistic += (obs[c] - exp[c]) * (obs[c] - exp[c]) / exp[c];
  }
  out.cells = static_cast<int>(obs.size());
  out.df = std::max(0, out.cells - 1);
  out.p_value = chi2_sf(out.statistic, out.df);
  out.pass = out.df == 0 ? true : out.p_value >= alpha;
  return out;
}

Chi2Result chi2_independence(const std::vector<std::vector<double>>& table, double alpha) {
  std::vector<double> rows, cols;
  for (const auto& r : table) {
    rows.push_back(std::accumulate(r.begin(), r.end(), 0.0));
    if (cols.size() < r.size()) cols.resize(r.size(), 0.0);
    for (std::size_t c = 0; c < r.size(); ++c) cols[c] += r[c];
  }
  const double total = std::accumulate(rows.begin(), rows.end(), 0.0);
  Chi2Result out;
  if (total <= 0.0) return out;
  int live_rows = 0, live_cols = 0;
  for (double r : rows) live_rows += r > 0.0;
  for (double c : cols) live_cols += c > 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (rows[r] <= 0.0) continue;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c] <= 0.0) continue;
      const double e = rows[r] * cols[c] / total;
      const double o = c < table[r].size() ? table[r][c] : 0.0;
      out.statistic += (o - e) * (o - e) / e;
    }
  }
  out.cells = live_rows * live_cols;
  out.df = std::max(0, (live_rows - 1) * (live_cols - 1));
  out.p_value = chi2_sf(out.statistic, out.df);
  out.pass = out.df == 0 ? true : out.p_value >= alpha;
  return out;
}

double binomial_se(double p_hat, std::int64_t n) {
  if (n <= 0) throw DomainError("binomial_se: empty sample");
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(n));
}

Autocorrelation lag1_autocorrelation(const std::vector<double>& x) {
  if (x.size() < 3) throw DomainError("lag1_autocorrelation: need at least 3 values");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    den += (x[i] - mean) * (x[i] - mean);
    if (i + 1 < x.size()) num += (x[i] - mean) * (x[i + 1] - mean);
  }
  Autocorrelation out;
  out.r = den > 0.0 ? num / den : 0.0;
  out.se = 1.0 / std::sqrt(n - 1.0);
  out.z = out.r / out.se;
  return out;
}

std::vector<TailEstimate> empirical_tails(const std::vector<std::optional<int>>& samples,
                                          int horizon, int n_max) {
  std::vector<TailEstimate> out;
  for (int n = 0; n <= n_max; ++n) {
    TailEstimate t;
    t.n = n;
    std::int64_t above = 0;
    for (const auto& s : samples) {
      if (!s) {
        if (n > horizon) {
          ++t.excluded;
          continue;
        }
        ++above;
      } else if (*s > n) {
        ++above;
      }
      ++t.at_risk;
    }
    if (t.at_risk == 0) throw DomainError("empirical_tails: no samples at risk");
    t.estimate = static_cast<double>(above) / static_cast<double>(t.at_risk);
    t.std_error = binomial_se(t.estimate, t.at_risk);
    out.push_back(t);
  }
  return out;
}

}  // namespace mtcpp
