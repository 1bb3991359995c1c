#pragma once

#include "mtcpp/analytics.hpp"
#include "mtcpp/dchain.hpp"
#include "mtcpp/io.hpp"
#include "mtcpp/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mtcpp {

enum class Task { simulate, laws, validate, compare_two_type, dchain };

Task parse_task(const std::string& name);
const char* to_string(Task task);

struct TwoTypeConfig {
  double g = 0.3, p = 0.7, h1 = 0.8, m = 1.0;
};

struct RunConfig {
  Task task = Task::laws;
  std::optional<ModelSpec> spec;
  std::optional<LF> lf;
  std::string model_id = "model";
  int horizon = 10;
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  std::optional<Ordering> ordering;  // defaults to lf_first for LF, uniform otherwise
  InitMode init_mode = InitMode::conditioned_spine;
  TypeIndex root_type{1};
  int n_max = 6;
  StandingMode standing_mode = StandingMode::reject;
  int target_width = 1;
  TwoTypeConfig two_type;
  double z_threshold = 4.0;
  std::filesystem::path out_dir = ".";
  int threads = 1;

  Ordering effective_ordering() const;
  OffspringLaw law() const;
  /// Throws SchemaError unless samples >= 1, T >= 1 and, except for
  /// compare-two-type, exactly one model source is set.
  void validate() const;
};

/// Config file fields: model_lf / model_spec (path or inline object),
/// horizon, samples, seed, ordering, init_mode, root_type, n_max,
/// standing_mode, target_width, two_type {g, p, h1, m}, model_id, z_threshold.
/// Relative model paths resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// MTCPP_THREADS, or 1.
int threads_from_env();

struct EstimateRow {
  std::string statistic;
  int n = 0;
  double estimate = 1;
  double std_error = 0;
  std::optional<double> analytic;
  std::optional<double> z_score;
  std::int64_t at_risk = 0;
  std::int64_t excluded = 0;
};

/// Attaches `analytic` and the z-score. With a zero empirical standard error
/// the binomial standard error of the analytic value is used instead.
void attach_analytic(EstimateRow& row, double analytic);

/// One Monte Carlo draw per replicate of A_1 (the first chain step) and of
/// B_{l,1} for each type l, with the types of the relevant ancestors.
struct ReplicateDraw {
  std::optional<int> A1;
  TypeList A1_ancestors;  // [n-1] = type of the ancestor of (0,1) in generation -n, n = 1..T
  std::vector<std::optional<int>> B;       // per type; empty optional = censored
  std::vector<char> B_present;             // per type: a first type-l individual was found
  std::vector<TypeList> B_ancestors;       // per type, as A1_ancestors for i_{l,1}
};

struct McOptions {
  int horizon = 10;
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  std::uint64_t task_id = 0;
  InitMode init_mode = InitMode::conditioned_spine;
  TypeIndex root_type{1};
  int n_max = 6;  // B walks stop once the running maximum exceeds n_max
  bool want_B = true;
  int threads = 1;
  std::int64_t max_steps = 1'000'000;
};

std::vector<ReplicateDraw> mc_draws(const DChainModel& model, const McOptions& opt);

/// Empirical tails P(A_1 > n) and P(B_{l,1} > n), n = 0..n_max, with
/// binomial standard errors.
std::vector<EstimateRow> mc_estimate(const DChainModel& model, const McOptions& opt);
std::vector<EstimateRow> tail_rows(const std::string& statistic,
                                   const std::vector<std::optional<int>>& samples, int horizon,
                                   int n_max);

/// A generic worker pool run: f(r) for r in [0, count), results kept in index order.
void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& f);

void write_estimates_csv(std::ostream& os, const std::vector<EstimateRow>& rows);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 1;
inline constexpr int kExitGuard = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitIo = 4;

/// Dispatches the task and writes its outputs into config.out_dir.
/// Returns the exit status; errors are mapped onto the exit codes.
int run(const RunConfig& config, std::ostream& log);

}  // namespace mtcpp
