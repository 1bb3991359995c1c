#pragma once

#include "mtcpp/forest.hpp"
#include "mtcpp/lf.hpp"
#include "mtcpp/model.hpp"
#include "mtcpp/rng.hpp"

#include <algorithm>
#include <cmath>

namespace fixtures {

using namespace mtcpp;

// f1(s) = 1/2 + 1/2 s1 s2, f2(s) = 1/2 + 1/2 s1.
inline ModelSpec e1() {
  return ModelSpec(2, {{{{0, 0}, 0.5}, {{1, 1}, 0.5}}, {{{0, 0}, 0.5}, {{1, 0}, 0.5}}});
}

inline LF lf1() {
  LF p;
  p.H.resize(2, 2);
  p.H << 0.3, 0.4, 0.2, 0.5;
  p.g.resize(2);
  p.g << 0.4, 0.6;
  p.m = 1.5;
  return p;
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Root at generation -1 of type 1 with standing children of types 1, 2.
inline PlanarTree f1() {
  PlanarTree t(1);
  const int r = t.add_root(TypeIndex{1});
  t.add_child(r, TypeIndex{1});
  t.add_child(r, TypeIndex{2});
  t.reindex();
  return t;
}

// Depth 2, one generation -1 parent with three standing children.
inline PlanarTree three_wide() {
  PlanarTree t(2);
  const int r = t.add_root(TypeIndex{1});
  const int a = t.add_child(r, TypeIndex{2});
  t.add_child(a, TypeIndex{1});
  t.add_child(a, TypeIndex{2});
  t.add_child(a, TypeIndex{1});
  t.reindex();
  return t;
}

// Random LF parameters with spectral radius in [0.95, 2].
inline LF random_lf(Rng& rng, int k, double rho_lo = 0.95, double rho_hi = 2.0) {
  for (;;) {
    LF p;
    p.H.resize(k, k);
    p.g.resize(k);
    for (int i = 0; i < k; ++i) {
      const double keep = 0.3 + 0.6 * rng.uniform();
      double row = 0;
      for (int j = 0; j < k; ++j) {
        p.H(i, j) = 0.05 + rng.uniform();
        row += p.H(i, j);
      }
      p.H.row(i) *= keep / row;
      p.g[i] = 0.05 + rng.uniform();
    }
    p.g /= p.g.sum();
    p.m = 0.1 + 2.0 * rng.uniform();
    const double rho = perron<double>(lf_mean_matrix(p)).rho;
    if (rho >= rho_lo && rho <= rho_hi) return p;
  }
}

// Random non-singular spec with k types and support of at most `support` rows.
inline ModelSpec random_spec(Rng& rng, int k, int support = 3, int max_children = 2) {
  std::vector<std::vector<PmfRow>> pmf(k);
  for (int l = 0; l < k; ++l) {
    std::vector<PmfRow> rows;
    rows.push_back({std::vector<int>(k, 0), 0.0});  // allow extinction
    while (static_cast<int>(rows.size()) < support) {
      std::vector<int> c(k);
      int total = 0;
      for (int j = 0; j < k; ++j) {
        c[j] = static_cast<int>(rng.below(max_children + 1));
        total += c[j];
      }
      if (total == 0 || total > max_children + 1) continue;
      if (std::any_of(rows.begin(), rows.end(), [&](const PmfRow& r) { return r.counts == c; })) {
        continue;
      }
      rows.push_back({c, 0.0});
    }
    double sum = 0;
    for (auto& r : rows) sum += (r.p = 0.2 + rng.uniform());
    for (auto& r : rows) r.p /= sum;
    double acc = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) acc += rows[i].p;
    rows.back().p = 1.0 - acc;
    pmf[l] = std::move(rows);
  }
  return ModelSpec(k, std::move(pmf));
}

}  // namespace fixtures
