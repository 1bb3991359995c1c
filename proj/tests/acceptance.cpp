// Acceptance suite: one PASS/FAIL line per criterion.

#include "fixtures.hpp"

#include "mtcpp/analytics.hpp"
#include "mtcpp/dchain.hpp"
#include "mtcpp/harness.hpp"
#include "mtcpp/stats.hpp"

#include <chrono>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mtcpp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::vector<std::pair<std::string, LF>> lf_fixtures() {
  Rng rng(20240601);
  return {{"LF1", fixtures::lf1()},
          {"rand2a", fixtures::random_lf(rng, 2)},
          {"rand3a", fixtures::random_lf(rng, 3)},
          {"rand3b", fixtures::random_lf(rng, 3)}};
}

// Criteria 1 and 2 share their Monte Carlo runs.
struct LfMonteCarlo {
  Outcome coalescence, sametype;
};

LfMonteCarlo lf_monte_carlo() {
  LfMonteCarlo out;
  double worst_A = 0, worst_B = 0, slowest = 0;
  for (const auto& [name, p] : lf_fixtures()) {
    const auto t0 = Clock::now();
    const int T = 30;
    const DChainModel model(OffspringLaw(p), Ordering::lf_first, T);
    McOptions opt;
    opt.horizon = T;
    opt.samples = 100000;
    opt.seed = 1001;
    opt.task_id = 1;
    opt.n_max = 6;
    opt.threads = threads_from_env();
    auto rows = mc_estimate(model, opt);
    const double elapsed = seconds_since(t0);
    slowest = std::max(slowest, elapsed);
    if (elapsed >= 120) {
      out.coalescence.pass = false;
      out.coalescence.detail += " " + name + " took " + fmt("%.0f s", elapsed);
    }
    const auto A = lf_coalescence_forms(p, 6);
    for (auto& r : rows) {
      if (r.n == 0) continue;
      if (r.statistic == "A1") {
        attach_analytic(r, detail::checked_closed(A[r.n], "A1", r.n));
        worst_A = std::max(worst_A, std::abs(*r.z_score));
        if (std::abs(*r.z_score) > 4) {
          out.coalescence.pass = false;
          out.coalescence.detail += " " + name + "@n=" + std::to_string(r.n);
        }
      } else if (r.n <= 5) {
        const int l = std::stoi(r.statistic.substr(1));
        attach_analytic(r, lf_sametype_law(p, TypeIndex{l}, r.n));
        worst_B = std::max(worst_B, std::abs(*r.z_score));
        if (std::abs(*r.z_score) > 4) {
          out.sametype.pass = false;
          out.sametype.detail += " " + name + ":" + r.statistic + "@n=" + std::to_string(r.n);
        }
      }
    }
  }
  out.coalescence.detail = "max |z| = " + fmt("%.2f", worst_A) + ", slowest fixture " +
                           fmt("%.1f s", slowest) + out.coalescence.detail;
  out.sametype.detail = "max |z| = " + fmt("%.2f", worst_B) + out.sametype.detail;
  return out;
}

Outcome dual_forms() {
  Rng rng(3);
  double worst = 0;
  for (int point = 0; point < 20; ++point) {
    const LF p = fixtures::random_lf(rng, 1 + point % 4, 0.3, 3.0);
    const auto A = lf_coalescence_forms(p, 50);
    for (const auto& f : A) worst = std::max(worst, std::abs(f.product - f.closed));
    for (int l = 1; l <= p.k(); ++l) {
      for (const auto& f : lf_sametype_forms(p, TypeIndex{l}, 50)) {
        worst = std::max(worst, std::abs(f.product - f.closed));
      }
    }
  }
  return {worst <= 1e-9, "max |product - closed| = " + fmt("%.2e", worst)};
}

// Exact law of Z^(n) for the truncated finite-support law, from the
// n-fold composed pgf evaluated on a 256 x 256 grid of roots of unity and
// inverted by a discrete Fourier transform.
using cd = std::complex<double>;

std::vector<std::vector<double>> dft_law(const ModelSpec& spec, TypeIndex root, int n, int N) {
  const int maxc = [&] {
    int c = 0;
    for (const auto& rows : spec.pmf()) {
      for (const auto& r : rows) c = std::max({c, r.counts[0], r.counts[1]});
    }
    return c;
  }();
  const double two_pi = 2 * std::acos(-1.0);
  std::vector<std::vector<cd>> F(N, std::vector<cd>(N));
  std::vector<cd> pw0(maxc + 1), pw1(maxc + 1);
  for (int a = 0; a < N; ++a) {
    for (int b = 0; b < N; ++b) {
      cd s[2] = {std::polar(1.0, two_pi * a / N), std::polar(1.0, two_pi * b / N)};
      for (int step = 0; step < n; ++step) {
        pw0[0] = pw1[0] = 1.0;
        for (int c = 1; c <= maxc; ++c) {
          pw0[c] = pw0[c - 1] * s[0];
          pw1[c] = pw1[c - 1] * s[1];
        }
        cd next[2];
        for (int l = 0; l < 2; ++l) {
          for (const auto& r : spec.pmf()[l]) next[l] += r.p * pw0[r.counts[0]] * pw1[r.counts[1]];
        }
        s[0] = next[0];
        s[1] = next[1];
      }
      F[a][b] = s[root.zero_based()];
    }
  }
  // p(x, y) = N^-2 sum_{a,b} F(a, b) w^{-(a x + b y)}.
  std::vector<cd> tw(N);
  for (int j = 0; j < N; ++j) tw[j] = std::polar(1.0, -two_pi * j / N);
  std::vector<std::vector<cd>> G(N, std::vector<cd>(N));
  for (int a = 0; a < N; ++a) {
    for (int y = 0; y < N; ++y) {
      cd acc = 0;
      for (int b = 0; b < N; ++b) acc += F[a][b] * tw[(b * y) % N];
      G[a][y] = acc;
    }
  }
  std::vector<std::vector<double>> law(N, std::vector<double>(N));
  for (int x = 0; x < N; ++x) {
    for (int y = 0; y < N; ++y) {
      cd acc = 0;
      for (int a = 0; a < N; ++a) acc += G[a][y] * tw[(a * x) % N];
      law[x][y] = acc.real() / (double(N) * N);
    }
  }
  return law;
}

// pmf of the two-type LF law with the given parameters at counts (x, y).
double lf_pmf(const LF& p, int l, int x, int y) {
  if (x == 0 && y == 0) return p.h0()[l];
  // One h-child of type j, then Geometric(m) g-children split binomially.
  double total = 0;
  for (int j = 0; j < 2; ++j) {
    const int gx = x - (j == 0), gy = y - (j == 1);
    if (gx < 0 || gy < 0) continue;
    const int k = gx + gy;
    const double geo = std::exp(k * std::log(p.m / (1 + p.m)) - std::log1p(p.m));
    const double binom = std::exp(std::lgamma(k + 1.0) - std::lgamma(gx + 1.0) -
                                  std::lgamma(gy + 1.0) + gx * std::log(p.g[0]) +
                                  gy * std::log(p.g[1]));
    total += p.H(l, j) * geo * binom;
  }
  return total;
}

Outcome lf_closure() {
  Rng rng(4);
  const std::vector<std::pair<std::string, LF>> cases{{"LF1", fixtures::lf1()},
                                                      {"rand2", fixtures::random_lf(rng, 2, 0.95, 1.6)}};
  double worst = 0;
  const int N = 256;
  for (const auto& [name, p] : cases) {
    const ModelSpec spec = lf_to_modelspec(p, lf_truncation_for(p, 1e-13));
    const auto its = lf_iterate_all(p, 3);
    for (int n = 1; n <= 3; ++n) {
      const LF q = its[n].params();
      for (int root = 0; root < 2; ++root) {
        const auto law = dft_law(spec, TypeIndex::from_zero(root), n, N);
        double tv = 0, inside = 0;
        for (int x = 0; x < N; ++x) {
          for (int y = 0; y < N; ++y) {
            const double want = lf_pmf(q, root, x, y);
            inside += want;
            tv += std::abs(law[x][y] - want);
          }
        }
        tv = 0.5 * (tv + (1 - inside));
        worst = std::max(worst, tv);
      }
    }
  }
  return {worst <= 1e-8, "max total variation = " + fmt("%.2e", worst)};
}

Outcome general_formulas() {
  Rng rng(5);
  const std::vector<ModelSpec> specs{fixtures::e1(), fixtures::random_spec(rng, 2),
                                     fixtures::random_spec(rng, 3)};
  double worst = 0;
  int checked = 0;
  for (const auto& spec : specs) {
    const int k = spec.k();
    for (int n = 1; n <= 3; ++n) {
      for (int top = 1; top <= k; ++top) {
        double sumA = 0;
        for (const auto& a : all_prefixes(k, n, TypeIndex{top})) {
          const double law = joint_A1_law(spec, a);
          worst = std::max(worst, std::abs(law - oracle_enumerate(spec, n, {EnumerationEvent::Kind::A, a, {}})));
          sumA += law;
          ++checked;
        }
        worst = std::max(worst, std::abs(sumA - A1_tail(spec, TypeIndex{top}, n)));
        for (int l = 1; l <= k; ++l) {
          if (type_survival_vector(spec, n, TypeIndex{l})[top - 1] < kImpossibleEvent) continue;
          double sumB = 0;
          for (const auto& a : all_prefixes(k, n, TypeIndex{top})) {
            if (a[0].value != l) continue;
            const double law = joint_B1_law(spec, a, TypeIndex{l});
            worst = std::max(worst, std::abs(law - oracle_enumerate(spec, n, {EnumerationEvent::Kind::B, a, TypeIndex{l}})));
            sumB += law;
            ++checked;
          }
          worst = std::max(worst, std::abs(sumB - B1_tail(spec, TypeIndex{l}, TypeIndex{top}, n)));
        }
      }
    }
  }
  return {worst <= 1e-9, std::to_string(checked) + " prefixes, max deviation = " + fmt("%.2e", worst)};
}

Outcome chain_equivalence() {
  Outcome out;
  const auto run_case = [&](const std::string& name, const OffspringLaw& law, Ordering o, int T) {
    const DChainModel model(law, o, T);
    Rng rng(derive_seed(6, std::hash<std::string>{}(name) & 0xffff, 0));
    const int N = 100000;
    std::vector<int> forest[2], chain[2];
    for (int r = 0; r < N; ++r) {
      const auto s = simulate_standing(law, o, TypeIndex{1}, T, StandingMode::reject, 1, rng);
      const auto rec = coalescence_times(s.tree);
      for (int j = 0; j < 2; ++j) {
        forest[j].push_back(j < static_cast<int>(rec.size()) && rec[j].A ? *rec[j].A : T + 1);
      }
      DState d = init_quasistationary(model, InitMode::conditioned_spine, TypeIndex{1}, rng);
      bool censored = false;
      for (int j = 0; j < 2; ++j) {
        std::optional<StepResult> step;
        if (!censored) step = dchain_step(model, d, rng);
        censored = !step;
        chain[j].push_back(step ? step->A : T + 1);
        if (step) d = std::move(step->next);
      }
    }
    for (int j = 0; j < 2; ++j) {
      const auto ks = ks_compare(forest[j], chain[j]);
      out.pass = out.pass && ks.pass;
      out.detail += name + " A" + std::to_string(j + 1) + " D=" + fmt("%.4f", ks.distance) +
                    " (crit " + fmt("%.4f", ks.critical) + "); ";
    }
  };
  run_case("E1", OffspringLaw(fixtures::e1()), Ordering::uniform, 12);
  run_case("LF1", OffspringLaw(fixtures::lf1()), Ordering::lf_first, 10);

  const OffspringLaw lf(fixtures::lf1());
  const OffspringLaw e1(fixtures::e1());
  Rng rng(7);
  int exact = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int T = 1 + trial % 8;
    const OffspringLaw& law = trial % 2 ? lf : e1;
    const Ordering o = trial % 4 == 1 ? Ordering::lf_first : Ordering::uniform;
    const auto s = simulate_standing(law, o, TypeIndex{1 + trial % 2}, T, StandingMode::concatenate,
                                     1 + trial % 6, rng);
    const PlanarTree anc = ancestral_tree(s.tree);
    TypeList roots;
    for (int id : anc.generation(-T)) roots.push_back(anc.node(id).type);
    exact += reconstruct_tree(extract_dstates(s.tree), roots) == anc;
  }
  out.pass = out.pass && exact == 1000;
  out.detail += "round trip " + std::to_string(exact) + "/1000 node-exact";
  return out;
}

Outcome two_type_grid() {
  bool equal = true, dom = true, third = true, g0 = true, g1 = true, closed = true;
  double worst_g0 = 0, worst_closed = 0;
  for (double g : {0.1, 0.3, 0.5}) {
    for (double p : {0.3, 0.5, 0.7, 0.9, 1.0}) {
      for (double h1 : {0.5, 0.8}) {
        for (double m : {0.5, 1.0, 2.0}) {
          TwoTypeComparison cmp;
          try {
            cmp = two_type_compare(g, p, h1, m, 10);
          } catch (const NumericConsistencyError&) {
            closed = false;
            continue;
          }
          for (const auto& r : cmp.rows) {
            equal = equal && std::abs(r.pA_s - r.pA_a) <= 1e-12;
            dom = dom && r.pB1_a >= r.pB1_s - 1e-12 && r.pB2_a <= r.pB2_s + 1e-12;
            if (p >= 0.5) third = third && r.pB1_s >= r.pB2_s - 1e-12;
            if (r.n >= 1) {
              worst_g0 = std::max(worst_g0, std::abs(r.G0));
              g0 = g0 && std::abs(r.G0) <= 1e-12;
              g1 = g1 && std::abs(r.G1 - 1) <= 1e-12;
              worst_closed = std::max(worst_closed, r.closed_form_error);
            }
          }
        }
      }
    }
  }
  std::string d = std::string("A equal ") + (equal ? "ok" : "FAIL") + ", dominance " +
                  (dom ? "ok" : "FAIL") + ", B1>=B2 " + (third ? "ok" : "FAIL") + ", G(1)=1 " +
                  (g1 ? "ok" : "FAIL") + ", G(0)=0 " + (g0 ? "ok" : "FAIL") +
                  " (max |G(0)| = " + fmt("%.3g", worst_g0) + "), closed forms " +
                  (closed ? "ok" : "FAIL") + " (max err " + fmt("%.2e", worst_closed) + ")";
  return {equal && dom && third && g0 && g1 && closed, d};
}

Outcome typefree_branches() {
  double worst = 0;
  const std::vector<Eigen::VectorXd> gs{fixtures::vec({0.5, 0.5}), fixtures::vec({0.2, 0.3, 0.5}),
                                        fixtures::vec({1.0})};
  std::vector<std::pair<double, double>> grid;
  for (double h0 : {0.1, 0.25, 0.5, 0.8}) {
    for (double m : {0.2, 1.0, 3.0}) grid.emplace_back(h0, m);
  }
  grid.emplace_back(0.25, 1.0 / 3.0);  // (1 - h0)(1 + m) = 1
  grid.emplace_back(0.5, 1.0);         // (1 - h0)(1 + m) = 1
  for (const auto& g : gs) {
    for (const auto& [h0, m] : grid) {
      const LF p = typefree_params(h0, m, g);
      for (int l = 1; l <= g.size(); ++l) {
        for (int n = 0; n <= 30; ++n) {
          const auto t = lf_typefree_laws(h0, m, g, TypeIndex{l}, n);
          worst = std::max(worst, std::abs(t.pA - lf_coalescence_law(p, n)));
          worst = std::max(worst, std::abs(t.pB - lf_sametype_law(p, TypeIndex{l}, n)));
        }
      }
    }
  }
  return {worst <= 1e-12, "max deviation = " + fmt("%.2e", worst)};
}

Outcome independence() {
  const DChainModel model(OffspringLaw(fixtures::lf1()), Ordering::lf_first, 30);
  Rng rng(9);
  std::vector<double> x, y;
  DState d = init_quasistationary(model, InitMode::conditioned_spine, TypeIndex{1}, rng);
  std::optional<int> prev;
  while (x.size() < 100000) {
    auto step = dchain_step(model, d, rng);
    if (!step) {
      d = init_quasistationary(model, InitMode::conditioned_spine, TypeIndex{1}, rng);
      prev.reset();
      continue;
    }
    if (prev) {
      x.push_back(*prev);
      y.push_back(step->A);
    }
    prev = step->A;
    d = std::move(step->next);
  }
  // Pearson correlation of consecutive pairs.
  const double n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double r = sxy / std::sqrt(sxx * syy);
  const double se = 1 / std::sqrt(n);
  return {std::abs(r) <= 3 * se,
          "r = " + fmt("%.5f", r) + ", SE = " + fmt("%.5f", se) + " over 100000 pairs"};
}

Outcome spine_decomposition() {
  Rng rng(10);
  const SpineReport r = spine_decomposition_test(fixtures::e1(), TypeIndex{1}, 1, 100000, rng);
  std::string d = std::to_string(r.cells.size()) + " cells, max |z| = " + fmt("%.2f", r.max_abs_z);
  for (const auto& t : r.subtree_tests) {
    if (t.df > 0) d += ", " + t.group + "(" + std::to_string(t.root_type.value) + ") p=" + fmt("%.3f", t.p_value);
  }
  return {r.structure_ok && r.cells_pass && r.subtrees_pass, d};
}

Outcome intensity() {
  double worst = 0, max_excess = -1;
  bool ok = true;
  int applicable = 0, strict = 0;
  const std::vector<Eigen::VectorXd> gs{fixtures::vec({0.5, 0.5}), fixtures::vec({0.2, 0.3, 0.5})};
  for (const auto& g : gs) {
    for (double h0 : {0.1, 0.25, 0.5, 0.8}) {
      for (double m : {0.2, 1.0 / 3.0, 1.0, 3.0}) {
        const LF p = typefree_params(h0, m, g);
        std::vector<std::function<double(int)>> pB;
        for (int l = 1; l <= g.size(); ++l) {
          pB.push_back([p, l](int n) { return lf_sametype_law(p, TypeIndex{l}, n); });
        }
        const auto rep = intensity_check([p](int n) { return lf_coalescence_law(p, n); }, pB, g, 30);
        worst = std::max(worst, rep.max_identity_error);
        ok = ok && rep.pass;
        for (const auto& r : rep.rows) {
          if (r.ell != 1 || r.nu_A <= 0 || r.nu_A >= 1) continue;
          ++applicable;
          strict += r.strict;
          max_excess = std::max(max_excess, r.sum_B - r.nu_A);
        }
      }
    }
  }
  return {ok && worst <= 1e-9, "max identity error = " + fmt("%.2e", worst) +
                                   ", strict subpartition at " + std::to_string(strict) + "/" +
                                   std::to_string(applicable) + " points, max(sum nu_B - nu_A) = " +
                                   fmt("%.3g", max_excess)};
}

std::map<std::string, std::string> outputs_of(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    out[e.path().filename().string()] = os.str();
  }
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "mtcpp_acceptance_determinism";
  fs::remove_all(root);
  std::vector<RunConfig> configs;
  for (Task t : {Task::simulate, Task::laws, Task::validate, Task::compare_two_type, Task::dchain}) {
    for (int model = 0; model < 2; ++model) {
      RunConfig c;
      c.task = t;
      if (model == 0) {
        c.lf = fixtures::lf1();
      } else {
        c.spec = fixtures::e1();
        c.init_mode = InitMode::rejection;
      }
      c.horizon = 10;
      c.samples = 2000;
      c.n_max = 3;
      c.seed = 12345;
      configs.push_back(c);
    }
  }
  int identical = 0, total = 0;
  std::string bad;
  std::ostringstream log;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    RunConfig a = configs[i], b = configs[i];
    a.out_dir = root / (std::to_string(i) + "a");
    b.out_dir = root / (std::to_string(i) + "b");
    b.threads = 3;
    const int ca = run(a, log), cb = run(b, log);
    ++total;
    if (ca == cb && outputs_of(a.out_dir) == outputs_of(b.out_dir) && !outputs_of(a.out_dir).empty()) {
      ++identical;
    } else {
      bad += std::string(" ") + to_string(a.task);
    }
  }
  fs::remove_all(root);
  return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                  " runs byte-identical" + bad};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const Outcome& o) {
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
    failures += !o.pass;
  };
  auto guarded = [&](int id, const std::function<Outcome()>& f) {
    try {
      report(id, f());
    } catch (const std::exception& e) {
      report(id, {false, std::string("error: ") + e.what()});
    }
  };
  LfMonteCarlo mc;
  try {
    mc = lf_monte_carlo();
  } catch (const std::exception& e) {
    mc.coalescence = mc.sametype = {false, std::string("error: ") + e.what()};
  }
  report(1, mc.coalescence);
  report(2, mc.sametype);
  guarded(3, dual_forms);
  guarded(4, lf_closure);
  guarded(5, general_formulas);
  guarded(6, chain_equivalence);
  guarded(7, two_type_grid);
  guarded(8, typefree_branches);
  guarded(9, independence);
  guarded(10, spine_decomposition);
  guarded(11, intensity);
  guarded(12, determinism);
  std::cout << (12 - failures) << "/12 criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
