#include "mtcpp/model.hpp"

#include <string>

namespace mtcpp {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_argument(const ModelSpec& spec, const Eigen::VectorXd& s, const char* who) {
  if (s.size() != spec.k()) {
    throw DomainError(std::string(who) + ": argument has dimension " +
                      std::to_string(s.size()) + ", expected " + std::to_string(spec.k()));
  }
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    if (!(s[j] >= 0.0 && s[j] <= 1.0)) {
      throw DomainError(std::string(who) + ": argument outside [0,1]^k");
    }
  }
}

}  // namespace

ModelSpec::ModelSpec(int k, std::vector<std::vector<PmfRow>> pmf,
                     std::vector<std::string> names, bool allow_singular)
    : k_(k), pmf_(std::move(pmf)), names_(std::move(names)) {
  if (k_ < 1) throw SchemaError("model: k must be at least 1");
  if (static_cast<int>(pmf_.size()) != k_) {
    throw SchemaError("model: expected a pmf for each of the " + std::to_string(k_) +
                      " parent types, got " + std::to_string(pmf_.size()));
  }
  if (names_.empty()) {
    for (int l = 1; l <= k_; ++l) names_.push_back(std::to_string(l));
  }
  if (static_cast<int>(names_.size()) != k_) throw SchemaError("model: type name count != k");

  bool singular = true;
  for (int l = 0; l < k_; ++l) {
    const std::string where = "model: parent type " + std::to_string(l + 1);
    if (pmf_[l].empty()) throw SchemaError(where + ": empty pmf");
    double total = 0.0;
    for (std::size_t r = 0; r < pmf_[l].size(); ++r) {
      const PmfRow& row = pmf_[l][r];
      const std::string at = where + ", row " + std::to_string(r);
      if (static_cast<int>(row.counts.size()) != k_) {
        throw SchemaError(at + ": counts has length " + std::to_string(row.counts.size()));
      }
      int size = 0;
      for (int c : row.counts) {
        if (c < 0) throw SchemaError(at + ": negative count");
        size += c;
      }
      if (!(row.p >= 0.0 && row.p <= 1.0)) throw SchemaError(at + ": probability outside [0,1]");
      if (row.p > 0.0 && size != 1) singular = false;
      max_support_ = std::max(max_support_, size);
      total += row.p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw SchemaError(where + ": probabilities sum to " + std::to_string(total));
    }
  }
  if (singular && !allow_singular) {
    throw SchemaError("model: singular law (every parent has exactly one child)");
  }
}

void check_type(int k, TypeIndex ell) {
  if (ell.value < 1 || ell.value > k) {
    throw DomainError("type index " + std::to_string(ell.value) + " outside 1.." +
                      std::to_string(k));
  }
}

double pgf_eval(const ModelSpec& spec, TypeIndex ell, const Eigen::VectorXd& s) {
  check_type(spec.k(), ell);
  check_argument(spec, s, "pgf_eval");
  double total = 0.0;
  for (const PmfRow& row : spec.rows(ell)) {
    double term = row.p;
    for (int j = 0; j < spec.k(); ++j) term *= ipow(s[j], row.counts[j]);
    total += term;
  }
  return total;
}

Eigen::VectorXd pgf_iterate(const ModelSpec& spec, int n, const Eigen::VectorXd& s) {
  if (n < 0) throw DomainError("pgf_iterate: negative n");
  check_argument(spec, s, "pgf_iterate");
  Eigen::VectorXd x = s;
  for (int step = 0; step < n; ++step) {
    Eigen::VectorXd y(spec.k());
    for (int l = 0; l < spec.k(); ++l) y[l] = pgf_eval(spec, TypeIndex::from_zero(l), x);
    // Round-off can push values a hair above 1.
    x = y.cwiseMin(1.0).cwiseMax(0.0);
  }
  return x;
}

double pgf_partial(const ModelSpec& spec, TypeIndex ell, TypeIndex wrt,
                   const Eigen::VectorXd& s) {
  check_type(spec.k(), ell);
  check_type(spec.k(), wrt);
  check_argument(spec, s, "pgf_partial");
  const int w = wrt.zero_based();
  double total = 0.0;
  for (const PmfRow& row : spec.rows(ell)) {
    if (row.counts[w] == 0) continue;
    double term = row.p * row.counts[w];
    for (int j = 0; j < spec.k(); ++j) {
      term *= ipow(s[j], j == w ? row.counts[j] - 1 : row.counts[j]);
    }
    total += term;
  }
  return total;
}

Eigen::MatrixXd mean_matrix(const ModelSpec& spec) {
  const int k = spec.k();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
  for (int l = 0; l < k; ++l) {
    for (const PmfRow& row : spec.pmf()[l]) {
      for (int j = 0; j < k; ++j) M(l, j) += row.p * row.counts[j];
    }
  }
  return M;
}

Eigen::VectorXd survival_vector(const ModelSpec& spec, int n) {
  return Eigen::VectorXd::Ones(spec.k()) -
         pgf_iterate(spec, n, Eigen::VectorXd::Zero(spec.k()));
}

Eigen::VectorXd type_survival_vector(const ModelSpec& spec, int n, TypeIndex ell) {
  check_type(spec.k(), ell);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(spec.k());
  s[ell.zero_based()] = 0.0;
  return Eigen::VectorXd::Ones(spec.k()) - pgf_iterate(spec, n, s);
}

const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::sub: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::super: return "supercritical";
  }
  return "unknown";
}

}  // namespace mtcpp
