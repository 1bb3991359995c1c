#include "mtcpp/offspring.hpp"

#include <algorithm>

namespace mtcpp {

OffspringLaw::OffspringLaw(ModelSpec spec) : k_(spec.k()), spec_(std::move(spec)) {
  for (const auto& rows : spec_->pmf()) {
    std::vector<double> c;
    c.reserve(rows.size());
    double acc = 0.0;
    for (const PmfRow& r : rows) c.push_back(acc += r.p);
    cumulative_.push_back(std::move(c));
  }
}

OffspringLaw::OffspringLaw(LF lf) : k_(lf.k()) {
  validate(lf);
  lf_ = std::move(lf);
}

TypeList OffspringLaw::sample(TypeIndex parent, Ordering ordering, Rng& rng) const {
  check_type(k_, parent);
  if (lf_) {
    TypeList out = lf_sample_offspring(*lf_, parent, rng);
    if (ordering == Ordering::uniform) rng.shuffle(out);
    return out;
  }
  if (ordering == Ordering::lf_first) {
    throw DomainError("lf_first ordering requires linear-fractional parameters");
  }
  const auto& cum = cumulative_[parent.zero_based()];
  const double u = rng.uniform() * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  const PmfRow& row = spec_->rows(parent)[static_cast<std::size_t>(it - cum.begin())];
  TypeList out;
  for (int j = 0; j < k_; ++j) {
    for (int c = 0; c < row.counts[j]; ++c) out.push_back(TypeIndex::from_zero(j));
  }
  rng.shuffle(out);
  return out;
}

Eigen::MatrixXd OffspringLaw::mean_matrix() const {
  return lf_ ? lf_mean_matrix(*lf_) : mtcpp::mean_matrix(*spec_);
}

std::vector<Eigen::VectorXd> OffspringLaw::survival_table(int n) const {
  if (lf_) return lf_survival_table(*lf_, n);
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd q = Eigen::VectorXd::Zero(k_);
  out.push_back(Eigen::VectorXd::Ones(k_));
  for (int i = 1; i <= n; ++i) {
    q = pgf_iterate(*spec_, 1, q);
    out.push_back(Eigen::VectorXd::Ones(k_) - q);
  }
  return out;
}

std::vector<Eigen::VectorXd> lf_survival_table(const LF& p, int n) {
  using L = long double;
  const LFParams<L> pl = p.cast<L>();
  const MatrixX<L> M = lf_mean_matrix(pl);
  const VectorX<L> ones = VectorX<L>::Ones(p.k());
  std::vector<Eigen::VectorXd> out;
  out.push_back(Eigen::VectorXd::Ones(p.k()));
  VectorX<L> power_ones = ones;  // M^n 1
  L gS = 0;                      // g (I + ... + M^(n-1)) 1
  RowVectorX<L> gM = pl.g.transpose();
  for (int i = 1; i <= n; ++i) {
    gS += gM.sum();
    gM = gM * M;
    power_ones = M * power_ones;
    const L m_n = pl.m * gS;
    out.push_back((power_ones / (L(1) + m_n)).cwiseMin(L(1)).template cast<double>());
  }
  return out;
}

}  // namespace mtcpp
