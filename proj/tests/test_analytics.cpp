#include "fixtures.hpp"

#include "mtcpp/analytics.hpp"
#include "mtcpp/stats.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace mtcpp;

namespace {

const ModelSpec E1 = fixtures::e1();

TypeString ts(std::initializer_list<int> xs) {
  TypeString out;
  for (int x : xs) out.push_back(TypeIndex{x});
  return out;
}

// Small subcritical LF law; its finite-support version stays small enough
// for exact propagation.
LF small_lf() {
  LF p = fixtures::lf1();
  p.m = 0.25;
  p.H *= 0.8;
  return p;
}

TEST(JointA1, HandValues) {
  EXPECT_NEAR(joint_A1_law(E1, ts({1, 1})), 0.0, 1e-15);
  EXPECT_NEAR(joint_A1_law(E1, ts({1, 2})), 1.0, 1e-15);
  EXPECT_NEAR(joint_A1_law(E1, ts({2, 1})), 0.0, 1e-15);
}

TEST(JointA1, ImpossibleConditioning) {
  const ModelSpec dead(2, {{{{0, 0}, 0.5}, {{1, 0}, 0.5}}, {{{0, 0}, 1.0}}});
  EXPECT_THROW(joint_A1_law(dead, ts({1, 2})), ConditioningError);
}

TEST(JointA1, MatchesEnumeration) {
  Rng rng(1);
  std::vector<ModelSpec> specs{E1, fixtures::random_spec(rng, 2), fixtures::random_spec(rng, 3)};
  for (const auto& spec : specs) {
    for (int n = 1; n <= 3; ++n) {
      for (int top = 1; top <= spec.k(); ++top) {
        double total = 0;
        for (const auto& a : all_prefixes(spec.k(), n, TypeIndex{top})) {
          const double law = joint_A1_law(spec, a);
          const double oracle = oracle_enumerate(spec, n, {EnumerationEvent::Kind::A, a, {}});
          EXPECT_NEAR(law, oracle, 1e-9) << to_string(a);
          total += law;
        }
        EXPECT_NEAR(total, A1_tail(spec, TypeIndex{top}, n), 1e-9);
      }
    }
  }
}

TEST(JointB1, HandValuesAndSingleType) {
  EXPECT_NEAR(joint_B1_law(E1, ts({1, 2}), TypeIndex{1}), 1.0, 1e-15);
  EXPECT_THROW(joint_B1_law(E1, ts({2, 1}), TypeIndex{1}), DomainError);
  const ModelSpec one(1, {{{{0}, 0.3}, {{1}, 0.3}, {{2}, 0.4}}});
  for (int n = 1; n <= 3; ++n) {
    for (const auto& a : all_prefixes(1, n, TypeIndex{1})) {
      EXPECT_NEAR(joint_B1_law(one, a, TypeIndex{1}), joint_A1_law(one, a), 1e-15);
    }
    EXPECT_NEAR(B1_tail(one, TypeIndex{1}, TypeIndex{1}, n), A1_tail(one, TypeIndex{1}, n), 1e-15);
  }
}

TEST(JointB1, MatchesEnumeration) {
  Rng rng(2);
  std::vector<ModelSpec> specs{E1, fixtures::random_spec(rng, 2), fixtures::random_spec(rng, 3)};
  for (const auto& spec : specs) {
    for (int l = 1; l <= spec.k(); ++l) {
      for (int n = 1; n <= 3; ++n) {
        for (int top = 1; top <= spec.k(); ++top) {
          if (type_survival_vector(spec, n, TypeIndex{l})[top - 1] < kImpossibleEvent) continue;
          double total = 0;
          for (const auto& a : all_prefixes(spec.k(), n, TypeIndex{top})) {
            if (a[0].value != l) continue;
            const double law = joint_B1_law(spec, a, TypeIndex{l});
            const double oracle =
                oracle_enumerate(spec, n, {EnumerationEvent::Kind::B, a, TypeIndex{l}});
            EXPECT_NEAR(law, oracle, 1e-9) << to_string(a) << " l=" << l;
            total += law;
          }
          EXPECT_NEAR(total, B1_tail(spec, TypeIndex{l}, TypeIndex{top}, n), 1e-9);
        }
      }
    }
  }
}

TEST(Tails, Basics) {
  EXPECT_EQ(A1_tail(E1, TypeIndex{1}, 0), 1.0);
  EXPECT_NEAR(A1_tail(E1, TypeIndex{2}, 1), 1.0, 1e-15);
  EXPECT_NEAR(A1_tail(E1, TypeIndex{1}, 1), 0.0, 1e-15);
  EXPECT_EQ(B1_tail(E1, TypeIndex{2}, TypeIndex{2}, 0), 1.0);
  // The conditioning moves with n, so tails for a fixed top type need not
  // be monotone.
  EXPECT_GT(A1_tail(E1, TypeIndex{1}, 2), A1_tail(E1, TypeIndex{1}, 1));
  for (int top = 1; top <= 2; ++top) {
    for (int n = 1; n <= 6; ++n) {
      const double a = A1_tail(E1, TypeIndex{top}, n);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
    }
  }
}

TEST(Tails, LfMatchesClosedForms) {
  const LF p = small_lf();
  const ModelSpec s = lf_to_modelspec(p, lf_truncation_for(p, 1e-12));
  for (int n = 1; n <= 4; ++n) {
    for (int top = 1; top <= 2; ++top) {
      const TailValue a = A1_tail_detail(s, TypeIndex{top}, n);
      EXPECT_LT(a.mass_deficit, 1e-10);
      EXPECT_NEAR(a.value, lf_coalescence_law(p, n), 1e-8) << "n=" << n;
      for (int l = 1; l <= 2; ++l) {
        EXPECT_NEAR(B1_tail(s, TypeIndex{l}, TypeIndex{top}, n), lf_sametype_law(p, TypeIndex{l}, n),
                    1e-8);
      }
    }
  }
}

TEST(PopulationLaw, Basics) {
  const auto zero = conditioned_popsize_law(E1, 0, TypeIndex{2}, 64);
  ASSERT_EQ(zero.pmf.size(), 1u);
  EXPECT_EQ(zero.pmf.begin()->first, (Counts{0, 1}));
  const auto one = conditioned_popsize_law(E1, 1, TypeIndex{1}, 64);
  ASSERT_EQ(one.pmf.size(), 2u);
  EXPECT_DOUBLE_EQ(one.pmf.at(Counts{0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(one.pmf.at(Counts{1, 1}), 0.5);
  for (int n = 1; n <= 6; ++n) {
    const auto law = conditioned_popsize_law(E1, n, TypeIndex{1}, 64);
    double total = 0;
    for (const auto& [c, p] : law.pmf) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT(law.mass_deficit, 1e-12);
    EXPECT_NEAR(law.pmf.at(Counts{0, 0}), 1 - survival_vector(E1, n)[0], 1e-12);
  }
}

TEST(PopulationLaw, AgreesWithTails) {
  Rng rng(6);
  const std::vector<ModelSpec> specs{E1, fixtures::random_spec(rng, 2), fixtures::random_spec(rng, 3)};
  for (const auto& spec : specs) {
    for (int n = 1; n <= 3; ++n) {  // at most 3^3 individuals, inside the cap
      for (int top = 1; top <= spec.k(); ++top) {
        const auto law = conditioned_popsize_law(spec, n, TypeIndex{top}, 64);
        double zero = 0, one = 0;
        for (const auto& [z, p] : law.pmf) {
          const int s = std::accumulate(z.begin(), z.end(), 0);
          zero += s == 0 ? p : 0.0;
          one += s == 1 ? p : 0.0;
        }
        if (1 - zero < kImpossibleEvent) continue;
        EXPECT_NEAR(A1_tail(spec, TypeIndex{top}, n), one / (1 - zero), 1e-10);
        for (int l = 1; l <= spec.k(); ++l) {
          double lz = 0, lo = 0;
          for (const auto& [z, p] : law.pmf) {
            lz += z[l - 1] == 0 ? p : 0.0;
            lo += z[l - 1] == 1 ? p : 0.0;
          }
          if (1 - lz < kImpossibleEvent) continue;
          EXPECT_NEAR(B1_tail(spec, TypeIndex{l}, TypeIndex{top}, n), lo / (1 - lz), 1e-10);
        }
      }
    }
  }
}

TEST(PopulationLaw, CapTooSmall) {
  const ModelSpec s = lf_to_modelspec(fixtures::lf1(), 60);
  EXPECT_THROW(conditioned_popsize_law(s, 3, TypeIndex{1}, 4), GuardError);
}

TEST(Oracle, Guard) {
  const ModelSpec s = lf_to_modelspec(small_lf(), 30);
  EXPECT_THROW(oracle_enumerate(s, 1, {EnumerationEvent::Kind::A, ts({1, 1}), {}}), GuardError);
  EXPECT_THROW(oracle_enumerate(E1, 5, {EnumerationEvent::Kind::A, ts({1, 1, 1, 1, 1, 1}), {}}),
               GuardError);
}

TEST(Oracle, TotalProbability) {
  for (int n = 1; n <= 3; ++n) {
    for (int top = 1; top <= 2; ++top) {
      double total = 0;
      for (const auto& a : all_prefixes(2, n, TypeIndex{top})) {
        total += oracle_enumerate(E1, n, {EnumerationEvent::Kind::A, a, {}});
      }
      EXPECT_NEAR(total, A1_tail(E1, TypeIndex{top}, n), 1e-12);
    }
  }
}

TEST(Intensity, Degenerate) {
  const auto one = intensity_check([](int) { return 1.0; }, {[](int) { return 1.0; }},
                                   fixtures::vec({1.0}), 5);
  for (const auto& r : one.rows) {
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.rhs, 0.0);
  }
  EXPECT_TRUE(one.pass);
  auto pA = [](int n) { return 1.0 / (1.0 + 0.7 * n); };
  const auto single = intensity_check(pA, {pA}, fixtures::vec({1.0}), 10);
  for (const auto& r : single.rows) EXPECT_NEAR(r.lhs, r.nu_A, 1e-15);
  EXPECT_TRUE(single.pass);
}

TEST(Intensity, TypeFreeGrid) {
  const Eigen::VectorXd g = fixtures::vec({0.2, 0.3, 0.5});
  for (double h0 : {0.1, 0.25, 0.5, 0.8}) {
    for (double m : {0.2, 1.0 / 3.0, 1.0, 3.0}) {
      auto pA = [&](int n) { return lf_typefree_laws(h0, m, g, TypeIndex{1}, n).pA; };
      std::vector<std::function<double(int)>> pB;
      for (int l = 1; l <= 3; ++l) {
        pB.push_back([&, l](int n) { return lf_typefree_laws(h0, m, g, TypeIndex{l}, n).pB; });
      }
      const auto report = intensity_check(pA, pB, g, 30);
      EXPECT_LE(report.max_identity_error, 1e-9);
      // Each denominator is at most one, so the same-type intensities
      // cover at least the whole coalescence intensity.
      for (const auto& r : report.rows) {
        EXPECT_GE(r.sum_B, r.nu_A - 1e-12);
        if (r.nu_A > 0 && r.nu_A < 1) EXPECT_FALSE(r.strict);
      }
      EXPECT_FALSE(report.subpartition_ok);
    }
  }
}

TEST(Spine, E1Decomposition) {
  Rng rng(3);
  const SpineReport r = spine_decomposition_test(E1, TypeIndex{1}, 1, 20000, rng);
  EXPECT_TRUE(r.structure_ok);
  EXPECT_TRUE(r.cells_pass) << "max |z| = " << r.max_abs_z;
  EXPECT_TRUE(r.subtrees_pass);
  for (const auto& t : r.subtree_tests) {
    if (t.group == "free" && t.count > 0) {
      EXPECT_LE(std::abs(t.mean_observed - t.mean_expected), 4 * t.mean_se + 1e-12);
    }
  }
}

TEST(Spine, SingleChildPartition) {
  // A single surviving child leaves no subtrees to its left or right.
  const ModelSpec s(1, {{{{0}, 0.4}, {{1}, 0.6}}}, {}, false);
  Rng rng(4);
  const SpineReport r = spine_decomposition_test(s, TypeIndex{1}, 2, 2000, rng);
  EXPECT_TRUE(r.structure_ok);
  for (const auto& c : r.cells) EXPECT_EQ(c.R, 1);
  for (const auto& t : r.subtree_tests) {
    if (t.group != "survive") EXPECT_EQ(t.count, 0);
  }
}

TEST(Invariance, OrderingDoesNotChangeLfTails) {
  // Uniform and leftmost-h orderings give the same coalescence law.
  const LF p = fixtures::lf1();
  const int T = 12, N = 20000;
  std::vector<int> samples[2];
  for (int o = 0; o < 2; ++o) {
    const DChainModel model(OffspringLaw(p), o ? Ordering::lf_first : Ordering::uniform, T);
    Rng rng(5 + o);
    for (int r = 0; r < N; ++r) {
      const DState d = init_quasistationary(model, InitMode::conditioned_spine, TypeIndex{1}, rng);
      const auto step = dchain_step(model, d, rng);
      samples[o].push_back(step ? step->A : T + 1);
    }
  }
  EXPECT_TRUE(ks_compare(samples[0], samples[1]).pass);
}

}  // namespace
