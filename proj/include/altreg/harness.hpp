#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "altreg/adversary.hpp"
#include "altreg/common.hpp"
#include "altreg/learners.hpp"
#include "altreg/regret.hpp"

namespace altreg {

struct RatePoint {
  std::int64_t T;
  double value;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int excluded = 0;  // zero/negative values dropped before the log-log fit
};

/// Ordinary least squares on (ln T, ln value). Needs >= 4 valid points.
RateFit fit_rate(const std::vector<RatePoint>& points);

struct LearnerSpec {
  std::string kind;            // hedge | ftrl | chedge | oogd | prm_plus | constant
  std::optional<double> eta;   // absent = paper-default rule
  std::optional<Vector> point; // constant learner
};

struct EnvSpec {
  std::string kind;  // hedge_cycle | hedge_constant | pm_alternating |
                     // random_bounded | random_quadratic
  int d = 0;
  double lo = 0.0;
  double hi = 1.0;
  double scale = 1.0;
};

struct ExperimentConfig {
  LearnerSpec learner;
  EnvSpec env;
  std::optional<Domain> domain;  // required for random envs, implied otherwise
  std::vector<std::int64_t> horizons;
  std::optional<Vector> comparator;  // absent = best fixed in hindsight
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int jobs = 1;

  /// Strict parse: unknown keys are rejected with their field path.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct TraceRow {
  std::int64_t t = 0;
  Vector x;
  double loss_value = 0.0;
  double reg_std = 0.0;  // cumulative, against the run comparator
  double reg_cht = 0.0;
  double reg_alt = 0.0;
  std::optional<double> diag_commutator;
};

struct RunResult {
  std::int64_t horizon = 0;  // effective (after environment truncation)
  bool truncated = false;
  double eta = std::numeric_limits<double>::quiet_NaN();
  std::vector<TraceRow> rows;
  Vector comparator;
  double best_fixed_value = 0.0;
  double reg_std = 0.0;
  double reg_cht = 0.0;
  double reg_alt = 0.0;
  double max_commutator = std::numeric_limits<double>::quiet_NaN();
  double wall_time_s = 0.0;
  nlohmann::json summary;
};

RunResult run_experiment(const ExperimentConfig& cfg, std::int64_t horizon);

struct SweepResult {
  std::vector<RatePoint> points;
  RateFit fit;
  std::vector<RunResult> runs;
};

/// Runs every horizon (fan-out over a worker pool when jobs > 1; results are
/// merged in horizon order so parallel and serial agree exactly).
SweepResult run_sweep(const ExperimentConfig& cfg);

Environment make_environment(const EnvSpec& spec, std::uint64_t seed);
Domain experiment_domain(const ExperimentConfig& cfg);
std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const Domain& dom,
                                      double eta);

/// Fixed learning-rate defaults: Hedge T^{-1/3} (ln d)^{1/3}; continuous
/// Hedge min{1, T^{-1/3} (d ln T)^{1/3}}; FTRL ball/simplex rules driven by
/// the certified (L, beta, C) of the loss sequence; OOGD T^{-1/2}.
double paper_eta(const LearnerSpec& learner, const Domain& dom,
                 const std::vector<LossFn>& losses, std::int64_t horizon);

/// 17-significant-digit, locale-independent float formatting (the bit-exact
/// trace contract).
std::string format_double(double v);

std::string trace_csv(const std::vector<TraceRow>& rows);
std::string rates_csv(const std::vector<RatePoint>& points);
std::vector<RatePoint> rates_from_csv(const std::string& text);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct VerifyRow {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Closed-form oracle checks (cycling/constant Hedge environments, OOGD
/// iterates and regret, PRM+ state recurrences and bounds).
std::vector<VerifyRow> verify_oracles();

}  // namespace altreg
