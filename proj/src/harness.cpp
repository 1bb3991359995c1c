#include "mtcpp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

namespace mtcpp {

namespace fs = std::filesystem;
using nlohmann::json;

Task parse_task(const std::string& name) {
  if (name == "simulate") return Task::simulate;
  if (name == "laws") return Task::laws;
  if (name == "validate") return Task::validate;
  if (name == "compare-two-type") return Task::compare_two_type;
  if (name == "dchain") return Task::dchain;
  throw SchemaError("unknown task '" + name + "'");
}

const char* to_string(Task task) {
  switch (task) {
    case Task::simulate: return "simulate";
    case Task::laws: return "laws";
    case Task::validate: return "validate";
    case Task::compare_two_type: return "compare-two-type";
    case Task::dchain: return "dchain";
  }
  return "unknown";
}

namespace {

Ordering parse_ordering(const std::string& s) {
  if (s == "uniform") return Ordering::uniform;
  if (s == "lf_first") return Ordering::lf_first;
  throw SchemaError("unknown ordering '" + s + "'");
}

const char* ordering_name(Ordering o) { return o == Ordering::uniform ? "uniform" : "lf_first"; }

StandingMode parse_standing_mode(const std::string& s) {
  if (s == "reject") return StandingMode::reject;
  if (s == "concatenate") return StandingMode::concatenate;
  throw SchemaError("unknown standing mode '" + s + "'");
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

Ordering RunConfig::effective_ordering() const {
  if (ordering) return *ordering;
  return lf ? Ordering::lf_first : Ordering::uniform;
}

OffspringLaw RunConfig::law() const {
  if (lf) return OffspringLaw(*lf);
  if (spec) return OffspringLaw(*spec);
  throw SchemaError("config: no model given");
}

void RunConfig::validate() const {
  if (samples < 1) throw SchemaError("config: samples must be at least 1");
  if (horizon < 1) throw SchemaError("config: horizon must be at least 1");
  if (n_max < 0) throw SchemaError("config: n_max must be nonnegative");
  if (task != Task::compare_two_type && spec.has_value() == lf.has_value()) {
    throw SchemaError("config: exactly one of model_lf / model_spec is required");
  }
  if (spec && effective_ordering() == Ordering::lf_first) {
    throw SchemaError("config: lf_first ordering needs a linear-fractional model");
  }
  const int k = lf ? lf->k() : (spec ? spec->k() : 2);
  if (root_type.value < 1 || root_type.value > k) throw SchemaError("config: root_type outside 1..k");
}

RunConfig config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw SchemaError("config: expected a JSON object");
  RunConfig c;
  if (j.contains("task")) c.task = parse_task(field<std::string>(j, "task", ""));
  auto load = [&](const char* key) -> std::optional<json> {
    if (!j.contains(key)) return std::nullopt;
    const json& v = j.at(key);
    if (v.is_string()) {
      fs::path p = v.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      return read_json_file(p);
    }
    return v;
  };
  if (auto v = load("model_lf")) c.lf = lfparams_from_json(*v);
  if (auto v = load("model_spec")) c.spec = modelspec_from_json(*v);
  c.model_id = field<std::string>(j, "model_id", c.model_id);
  c.horizon = field<int>(j, "horizon", c.horizon);
  c.samples = field<std::int64_t>(j, "samples", c.samples);
  c.seed = field<std::uint64_t>(j, "seed", c.seed);
  if (j.contains("ordering")) c.ordering = parse_ordering(field<std::string>(j, "ordering", ""));
  if (j.contains("init_mode")) c.init_mode = parse_init_mode(field<std::string>(j, "init_mode", ""));
  c.root_type = TypeIndex{field<int>(j, "root_type", 1)};
  c.n_max = field<int>(j, "n_max", c.n_max);
  if (j.contains("standing_mode")) {
    c.standing_mode = parse_standing_mode(field<std::string>(j, "standing_mode", ""));
  }
  c.target_width = field<int>(j, "target_width", c.target_width);
  c.z_threshold = field<double>(j, "z_threshold", c.z_threshold);
  if (j.contains("two_type")) {
    const json& t = j.at("two_type");
    c.two_type.g = field<double>(t, "g", c.two_type.g);
    c.two_type.p = field<double>(t, "p", c.two_type.p);
    c.two_type.h1 = field<double>(t, "h1", c.two_type.h1);
    c.two_type.m = field<double>(t, "m", c.two_type.m);
  }
  return c;
}

int threads_from_env() {
  const char* v = std::getenv("MTCPP_THREADS");
  if (v == nullptr) return 1;
  const int n = std::atoi(v);
  return n >= 1 ? n : 1;
}

void attach_analytic(EstimateRow& row, double analytic) {
  row.analytic = analytic;
  double se = row.std_error;
  if (!(se > 0.0) && row.at_risk > 0) {
    se = std::sqrt(std::max(0.0, analytic * (1.0 - analytic)) / static_cast<double>(row.at_risk));
  }
  if (se > 0.0) {
    row.z_score = (row.estimate - analytic) / se;
  } else {
    row.z_score = std::abs(row.estimate - analytic) <= 1e-12 ? 0.0 : INFINITY;
  }
}

void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& f) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::int64_t>(count, 256))));
  if (threads == 1) {
    for (std::int64_t r = 0; r < count; ++r) f(r);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::int64_t r = t; r < count; r += threads) f(r);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

// Types of the ancestors of the standing individual of `d` in generations
// -1..-T; the generation -T entry is the root.
TypeList ancestors_of(const DState& d, TypeIndex root) {
  TypeList out;
  for (int n = 1; n < d.horizon(); ++n) out.push_back(d.levels[n].front());
  out.push_back(root);
  return out;
}

std::optional<ModelSpec> biased_law(const DChainModel& model, InitMode mode) {
  if (mode != InitMode::sizebiased_spine) return std::nullopt;
  const OffspringLaw& law = model.law();
  if (law.is_lf()) return size_biased_spec(lf_to_modelspec(law.lf(), lf_truncation_for(law.lf())));
  return size_biased_spec(law.spec());
}

}  // namespace

std::vector<ReplicateDraw> mc_draws(const DChainModel& model, const McOptions& opt) {
  if (opt.samples < 1) throw DomainError("mc_draws: samples must be positive");
  const int k = model.law().k();
  const std::optional<ModelSpec> biased = biased_law(model, opt.init_mode);
  std::vector<ReplicateDraw> draws(opt.samples);

  parallel_for(opt.samples, opt.threads, [&](std::int64_t r) {
    Rng rng(derive_seed(opt.seed, opt.task_id, static_cast<std::uint64_t>(r)));
    ReplicateDraw& draw = draws[r];
    DState d = init_quasistationary(model, opt.init_mode, opt.root_type, rng,
                                    biased ? &*biased : nullptr);
    draw.A1_ancestors = ancestors_of(d, opt.root_type);
    draw.B.assign(k, std::nullopt);
    draw.B_present.assign(k, 0);
    draw.B_ancestors.assign(k, {});

    enum class Phase { searching, running, done };
    std::vector<Phase> phase(k, opt.want_B ? Phase::searching : Phase::done);
    std::vector<int> running(k, 0);
    for (std::int64_t step = 0; step < opt.max_steps; ++step) {
      const TypeIndex t = d.standing_type();
      const int tl = t.zero_based();
      for (int l = 0; l < k; ++l) {
        if (phase[l] == Phase::running && l == tl) {
          draw.B[l] = running[l];
          phase[l] = Phase::done;
        }
      }
      if (phase[tl] == Phase::searching) {
        phase[tl] = Phase::running;
        draw.B_present[tl] = 1;
        draw.B_ancestors[tl] = ancestors_of(d, opt.root_type);
      }
      const bool b_open = std::any_of(phase.begin(), phase.end(),
                                      [](Phase p) { return p != Phase::done; });
      if (step > 0 && !b_open) break;

      std::optional<StepResult> next = dchain_step(model, d, rng);
      if (!next) {
        // Censored: open gaps are known only to exceed the horizon.
        for (int l = 0; l < k; ++l) {
          if (phase[l] == Phase::running) draw.B[l] = std::nullopt;
          phase[l] = Phase::done;
        }
        break;
      }
      if (step == 0) draw.A1 = next->A;
      for (int l = 0; l < k; ++l) {
        if (phase[l] != Phase::running) continue;
        running[l] = std::max(running[l], next->A);
        if (running[l] > opt.n_max) {
          draw.B[l] = running[l];
          phase[l] = Phase::done;
        }
      }
      d = std::move(next->next);
    }
    for (int l = 0; l < k; ++l) {
      // Step cap reached with the gap still open: drop the draw for l.
      if (phase[l] == Phase::running) draw.B_present[l] = 0;
    }
  });
  return draws;
}

std::vector<EstimateRow> tail_rows(const std::string& statistic,
                                   const std::vector<std::optional<int>>& samples, int horizon,
                                   int n_max) {
  std::vector<EstimateRow> out;
  if (samples.empty()) return out;
  for (const TailEstimate& t : empirical_tails(samples, horizon, n_max)) {
    EstimateRow row;
    row.statistic = statistic;
    row.n = t.n;
    row.estimate = t.estimate;
    row.std_error = t.std_error;
    row.at_risk = t.at_risk;
    row.excluded = t.excluded;
    out.push_back(row);
  }
  return out;
}

std::vector<EstimateRow> mc_estimate(const DChainModel& model, const McOptions& opt) {
  const auto draws = mc_draws(model, opt);
  std::vector<std::optional<int>> A;
  for (const auto& d : draws) A.push_back(d.A1);
  std::vector<EstimateRow> out = tail_rows("A1", A, model.horizon(), opt.n_max);
  if (opt.want_B) {
    for (int l = 0; l < model.law().k(); ++l) {
      std::vector<std::optional<int>> B;
      for (const auto& d : draws) {
        if (d.B_present[l]) B.push_back(d.B[l]);
      }
      auto rows = tail_rows("B" + std::to_string(l + 1), B, model.horizon(), opt.n_max);
      out.insert(out.end(), rows.begin(), rows.end());
    }
  }
  return out;
}

void write_estimates_csv(std::ostream& os, const std::vector<EstimateRow>& rows) {
  os << "statistic,n,estimate,std_error,analytic,z_score,at_risk,excluded\n";
  for (const auto& r : rows) {
    os << r.statistic << ',' << r.n << ',' << format_double(r.estimate) << ','
       << format_double(r.std_error) << ',';
    if (r.analytic) os << format_double(*r.analytic);
    os << ',';
    if (r.z_score) os << format_double(*r.z_score);
    os << ',' << r.at_risk << ',' << r.excluded << '\n';
  }
}

namespace {

std::ofstream open_out(const fs::path& dir, const char* name) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw IoError("cannot write " + (dir / name).string());
  return os;
}

void finish(std::ofstream& os, const fs::path& dir, const char* name) {
  os.flush();
  if (!os) throw IoError("error writing " + (dir / name).string());
}

json base_report(const RunConfig& c) {
  json r{{"task", to_string(c.task)},
         {"model", c.model_id},
         {"seed", c.seed},
         {"samples", c.samples},
         {"horizon", c.horizon}};
  return r;
}

// Shared by validate and dchain: z-checks on rows that carry analytic values.
json z_checks(const std::vector<EstimateRow>& rows, double threshold, bool& all_pass) {
  json checks = json::array();
  for (const auto& r : rows) {
    if (!r.z_score) continue;
    const bool ok = std::abs(*r.z_score) <= threshold;
    all_pass = all_pass && ok;
    checks.push_back({{"name", r.statistic + "@n=" + std::to_string(r.n)},
                      {"z", std::isfinite(*r.z_score) ? json(*r.z_score) : json("inf")},
                      {"pass", ok}});
  }
  return checks;
}

McOptions mc_options(const RunConfig& c, std::uint64_t task_id) {
  McOptions o;
  o.horizon = c.horizon;
  o.samples = c.samples;
  o.seed = c.seed;
  o.task_id = task_id;
  o.init_mode = c.init_mode;
  o.root_type = c.root_type;
  o.n_max = std::min(c.n_max, c.horizon);
  o.threads = c.threads;
  return o;
}

int run_simulate(const RunConfig& c, json& report) {
  Rng rng(derive_seed(c.seed, 1, 0));
  const OffspringLaw law = c.law();
  const StandingSample s = simulate_standing(law, c.effective_ordering(), c.root_type, c.horizon,
                                             c.standing_mode, c.target_width, rng);
  auto tree_os = open_out(c.out_dir, "tree.tsv");
  write_tree_tsv(tree_os, s.tree);
  finish(tree_os, c.out_dir, "tree.tsv");
  const auto records = coalescence_times(s.tree);
  auto rec_os = open_out(c.out_dir, "records.csv");
  write_records_csv(rec_os, records);
  finish(rec_os, c.out_dir, "records.csv");
  report["ordering"] = ordering_name(c.effective_ordering());
  report["standing_mode"] = c.standing_mode == StandingMode::reject ? "reject" : "concatenate";
  report["width"] = s.tree.generation(0).size();
  report["nodes"] = s.tree.size();
  report["trees"] = s.trees;
  report["rejections"] = s.rejections;
  report["checks"] = json::array({{{"name", "standing_nonempty"},
                                   {"pass", !s.tree.generation(0).empty()}}});
  report["pass"] = !s.tree.generation(0).empty();
  return kExitOk;
}

int run_laws(const RunConfig& c, json& report) {
  std::vector<LawRow> rows;
  const int n_max = c.n_max;
  bool monotone = true;
  auto push = [&](LawRow r) {
    // Spec tails condition on the ancestor type at -n, an event that moves
    // with n, so only the LF tails have to decrease.
    if (c.lf && !rows.empty() && rows.back().formula == r.formula &&
        rows.back().conditioning == r.conditioning && r.value > rows.back().value + 1e-12) {
      monotone = false;
    }
    rows.push_back(std::move(r));
  };
  if (c.lf) {
    const auto A = lf_coalescence_forms(*c.lf, n_max);
    for (int n = 0; n <= n_max; ++n) {
      push({"A1_closed", c.model_id, n, "-", detail::checked_closed(A[n], "laws", n), 0.0});
    }
    for (int n = 0; n <= n_max; ++n) push({"A1_product", c.model_id, n, "-", A[n].product, 0.0});
    for (int l = 1; l <= c.lf->k(); ++l) {
      const auto B = lf_sametype_forms(*c.lf, TypeIndex{l}, n_max);
      const std::string cond = "l=" + std::to_string(l);
      for (int n = 0; n <= n_max; ++n) {
        push({"B1_closed", c.model_id, n, cond, detail::checked_closed(B[n], "laws", n), 0.0});
      }
      for (int n = 0; n <= n_max; ++n) push({"B1_product", c.model_id, n, cond, B[n].product, 0.0});
    }
  } else {
    const ModelSpec& spec = *c.spec;
    for (int t = 1; t <= spec.k(); ++t) {
      for (int n = 0; n <= n_max; ++n) {
        const TailValue v = A1_tail_detail(spec, TypeIndex{t}, n);
        push({"A1_tail", c.model_id, n, "top=" + std::to_string(t), v.value, v.mass_deficit});
      }
    }
    for (int l = 1; l <= spec.k(); ++l) {
      for (int t = 1; t <= spec.k(); ++t) {
        for (int n = 0; n <= n_max; ++n) {
          if (type_survival_vector(spec, n, TypeIndex{l})[t - 1] < kImpossibleEvent) continue;
          const TailValue v = B1_tail_detail(spec, TypeIndex{l}, TypeIndex{t}, n);
          push({"B1_tail", c.model_id, n,
                "l=" + std::to_string(l) + ";top=" + std::to_string(t), v.value, v.mass_deficit});
        }
      }
    }
  }
  auto os = open_out(c.out_dir, "laws.csv");
  write_law_table(os, rows);
  finish(os, c.out_dir, "laws.csv");
  report["checks"] = json::array();
  if (c.lf) report["checks"].push_back({{"name", "tails_nonincreasing"}, {"pass", monotone}});
  report["pass"] = monotone;
  return kExitOk;
}

int run_validate(const RunConfig& c, json& report) {
  const DChainModel model(c.law(), c.effective_ordering(), c.horizon);
  McOptions opt = mc_options(c, 3);
  std::vector<EstimateRow> rows;
  if (c.lf) {
    rows = mc_estimate(model, opt);
    const auto A = lf_coalescence_forms(*c.lf, opt.n_max);
    std::vector<std::vector<DualForm<double>>> B;
    for (int l = 1; l <= c.lf->k(); ++l) B.push_back(lf_sametype_forms(*c.lf, TypeIndex{l}, opt.n_max));
    for (auto& r : rows) {
      if (r.statistic == "A1") {
        attach_analytic(r, detail::checked_closed(A[r.n], "validate", r.n));
      } else {
        const int l = std::stoi(r.statistic.substr(1));
        attach_analytic(r, detail::checked_closed(B[l - 1][r.n], "validate", r.n));
      }
    }
  } else {
    // Tails conditional on the type of the ancestor in generation -n.
    const ModelSpec& spec = *c.spec;
    const auto draws = mc_draws(model, opt);
    for (int n = 1; n <= opt.n_max; ++n) {
      for (int t = 1; t <= spec.k(); ++t) {
        std::vector<std::optional<int>> sample;
        for (const auto& d : draws) {
          if (d.A1_ancestors[n - 1].value == t) sample.push_back(d.A1);
        }
        if (sample.empty()) continue;
        EstimateRow row = tail_rows("A1|top=" + std::to_string(t), sample, c.horizon, n).back();
        attach_analytic(row, A1_tail(spec, TypeIndex{t}, n));
        rows.push_back(row);
      }
    }
    for (int l = 1; l <= spec.k(); ++l) {
      for (int n = 1; n <= opt.n_max; ++n) {
        for (int t = 1; t <= spec.k(); ++t) {
          std::vector<std::optional<int>> sample;
          for (const auto& d : draws) {
            if (d.B_present[l - 1] && d.B_ancestors[l - 1][n - 1].value == t) {
              sample.push_back(d.B[l - 1]);
            }
          }
          if (sample.empty()) continue;
          EstimateRow row = tail_rows("B" + std::to_string(l) + "|top=" + std::to_string(t),
                                      sample, c.horizon, n).back();
          attach_analytic(row, B1_tail(spec, TypeIndex{l}, TypeIndex{t}, n));
          rows.push_back(row);
        }
      }
    }
  }
  auto os = open_out(c.out_dir, "estimates.csv");
  write_estimates_csv(os, rows);
  finish(os, c.out_dir, "estimates.csv");
  bool pass = true;
  report["init_mode"] = to_string(c.init_mode);
  report["ordering"] = ordering_name(c.effective_ordering());
  report["z_threshold"] = c.z_threshold;
  report["checks"] = z_checks(rows, c.z_threshold, pass);
  report["pass"] = pass;
  return pass ? kExitOk : kExitValidation;
}

int run_compare(const RunConfig& c, json& report) {
  const auto& t = c.two_type;
  const TwoTypeComparison cmp = two_type_compare(t.g, t.p, t.h1, t.m, c.n_max);
  auto os = open_out(c.out_dir, "compare.csv");
  os << "n,pA,pB1_s,pB1_a,pB2_s,pB2_a\n";
  bool equal_A = true, dom1 = true, dom2 = true, third = true;
  for (const auto& r : cmp.rows) {
    os << r.n << ',' << format_double(r.pA_s) << ',' << format_double(r.pB1_s) << ','
       << format_double(r.pB1_a) << ',' << format_double(r.pB2_s) << ','
       << format_double(r.pB2_a) << '\n';
    equal_A = equal_A && std::abs(r.pA_s - r.pA_a) <= 1e-12;
    dom1 = dom1 && r.pB1_a >= r.pB1_s - 1e-12;
    dom2 = dom2 && r.pB2_a <= r.pB2_s + 1e-12;
    if (t.p >= 0.5) third = third && r.pB1_s >= r.pB2_s - 1e-12;
  }
  finish(os, c.out_dir, "compare.csv");
  report["two_type"] = {{"g", t.g}, {"p", t.p}, {"h1", t.h1}, {"m", t.m}};
  report["checks"] = json::array({{{"name", "A_tails_equal"}, {"pass", equal_A}},
                                  {{"name", "B1_asym_dominates"}, {"pass", dom1}},
                                  {{"name", "B2_sym_dominates"}, {"pass", dom2}},
                                  {{"name", "B1_over_B2_symmetric"}, {"pass", third}}});
  const bool pass = equal_A && dom1 && dom2 && third;
  report["pass"] = pass;
  return pass ? kExitOk : kExitValidation;
}

int run_dchain(const RunConfig& c, json& report) {
  const DChainModel model(c.law(), c.effective_ordering(), c.horizon);
  Rng rng(derive_seed(c.seed, 5, 0));
  std::optional<ModelSpec> biased = biased_law(model, c.init_mode);
  auto init = [&] {
    return init_quasistationary(model, c.init_mode, c.root_type, rng, biased ? &*biased : nullptr);
  };
  DState d = init();
  auto json_os = open_out(c.out_dir, "dstate.json");
  write_dstate_json(json_os, d);
  finish(json_os, c.out_dir, "dstate.json");

  auto os = open_out(c.out_dir, "chain.csv");
  os << "i,A,censored,standing_type,lineage\n";
  std::vector<std::optional<int>> A;
  std::vector<double> uncensored;
  std::int64_t restarts = 0;
  for (std::int64_t s = 0; s < c.samples; ++s) {
    const TypeIndex standing = d.standing_type();
    std::optional<StepResult> next = dchain_step(model, d, rng);
    os << s + 1 << ',';
    if (next) {
      os << next->A << ",0," << standing.value << ',' << to_string(next->lineage) << '\n';
      A.push_back(next->A);
      uncensored.push_back(next->A);
      d = std::move(next->next);
    } else {
      os << ",1," << standing.value << ",\n";
      A.push_back(std::nullopt);
      d = init();
      ++restarts;
    }
  }
  finish(os, c.out_dir, "chain.csv");

  std::vector<EstimateRow> rows = tail_rows("A", A, c.horizon, std::min(c.n_max, c.horizon));
  if (c.lf) {
    const auto forms = lf_coalescence_forms(*c.lf, std::min(c.n_max, c.horizon));
    for (auto& r : rows) attach_analytic(r, detail::checked_closed(forms[r.n], "dchain", r.n));
  }
  auto est = open_out(c.out_dir, "estimates.csv");
  write_estimates_csv(est, rows);
  finish(est, c.out_dir, "estimates.csv");

  bool pass = true;
  json checks = z_checks(rows, c.z_threshold, pass);
  if (uncensored.size() >= 3) {
    const Autocorrelation ac = lag1_autocorrelation(uncensored);
    report["lag1_autocorrelation"] = {{"r", ac.r}, {"se", ac.se}, {"z", ac.z}};
  }
  report["init_mode"] = to_string(c.init_mode);
  report["init_is_approximate"] = c.init_mode == InitMode::sizebiased_spine;
  report["restarts"] = restarts;
  report["checks"] = std::move(checks);
  report["pass"] = pass;
  return pass ? kExitOk : kExitValidation;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  try {
    config.validate();
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create " + config.out_dir.string() + ": " + ec.message());
    json report = base_report(config);
    int code = kExitOk;
    switch (config.task) {
      case Task::simulate: code = run_simulate(config, report); break;
      case Task::laws: code = run_laws(config, report); break;
      case Task::validate: code = run_validate(config, report); break;
      case Task::compare_two_type: code = run_compare(config, report); break;
      case Task::dchain: code = run_dchain(config, report); break;
    }
    report["exit_code"] = code;
    auto os = open_out(config.out_dir, "report.json");
    os << report.dump(2) << '\n';
    finish(os, config.out_dir, "report.json");
    return code;
  } catch (const SchemaError& e) {
    log << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const DomainError& e) {
    log << "invalid argument: " << e.what() << '\n';
    return kExitSchema;
  } catch (const ConditioningError& e) {
    log << "conditioning error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const GuardError& e) {
    log << "guard breached: " << e.what() << '\n';
    return kExitGuard;
  } catch (const NumericConsistencyError& e) {
    log << "consistency check failed: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    log << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace mtcpp
