#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace mtcpp {

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// P(X > x) for X chi-squared with df degrees of freedom.
double chi2_sf(double x, int df);

struct KsResult {
  double distance = 0;
  double critical = 0;
  bool pass = true;
};

/// Two-sample KS on integer data with the continuous asymptotic critical
/// value, which is conservative for discrete samples.
KsResult ks_compare(const std::vector<int>& a, const std::vector<int>& b, double alpha = 0.01);

struct Chi2Result {
  double statistic = 0;
  int df = 0;
  double p_value = 1;
  int cells = 0;  // after pooling
  bool pass = true;
};

/// Goodness of fit of counts to cell probabilities. Cells with expected
/// count below 5 are pooled. An observation in a zero-probability cell fails.
Chi2Result chi2_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                    double alpha = 0.01);

/// Pearson test of independence for a contingency table. Rows and columns
/// with zero margins are dropped.
Chi2Result chi2_independence(const std::vector<std::vector<double>>& table,
                             double alpha = 0.01);

double binomial_se(double p_hat, std::int64_t n);

struct Autocorrelation {
  double r = 0;
  double se = 0;
  double z = 0;
};

Autocorrelation lag1_autocorrelation(const std::vector<double>& x);

struct TailEstimate {
  int n = 0;
  double estimate = 1;
  double std_error = 0;
  std::int64_t at_risk = 0;
  std::int64_t excluded = 0;  // censored samples whose value is unknown beyond n
};

/// Empirical P(X > n) for n = 0..n_max. A censored sample (empty) only
/// says X > horizon; it is excluded from the at-risk set for n > horizon.
std::vector<TailEstimate> empirical_tails(const std::vector<std::optional<int>>& samples,
                                          int horizon, int n_max);

}  // namespace mtcpp
