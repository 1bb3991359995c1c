#pragma once

#include "mtcpp/lf.hpp"
#include "mtcpp/model.hpp"
#include "mtcpp/rng.hpp"

#include <optional>
#include <vector>

namespace mtcpp {

/// Either a finite-support spec or LF parameters, with what the samplers
/// need precomputed.
class OffspringLaw {
 public:
  explicit OffspringLaw(ModelSpec spec);
  explicit OffspringLaw(LF lf);

  int k() const { return k_; }
  bool is_lf() const { return lf_.has_value(); }
  const LF& lf() const { return *lf_; }
  const ModelSpec& spec() const { return *spec_; }
  bool has_spec() const { return spec_.has_value(); }

  /// Offspring of one type-`parent` individual, placed left to right.
  /// `lf_first` requires LF parameters.
  TypeList sample(TypeIndex parent, Ordering ordering, Rng& rng) const;

  Eigen::MatrixXd mean_matrix() const;
  /// p_0, ..., p_n.
  std::vector<Eigen::VectorXd> survival_table(int n) const;

 private:
  int k_ = 0;
  std::optional<ModelSpec> spec_;
  std::optional<LF> lf_;
  std::vector<std::vector<double>> cumulative_;  // per parent, over spec rows
};

/// p_n = 1 - f^(n)(0) for LF laws, through the identity H^(n) 1 = M^n 1 / (1 + m^(n)),
/// which avoids the cancellation in forming H^(n).
std::vector<Eigen::VectorXd> lf_survival_table(const LF& p, int n);

}  // namespace mtcpp
