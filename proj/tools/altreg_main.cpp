#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "altreg/dynamics.hpp"
#include "altreg/harness.hpp"

namespace {

using namespace altreg;

constexpr int kExitValidation = 2;
constexpr int kExitAssertion = 3;

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::int64_t> horizons;
  std::string eta;  // number or "paper"
  std::string learner;
  std::string env;
  std::optional<int> jobs;
};

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path, std::string("invalid JSON: ") + e.what());
  }
  return j;
}

// CLI flags override file values; ALTREG_OUT overrides both.
nlohmann::json apply_overrides(nlohmann::json j, const CliOverrides& o) {
  if (!o.out_dir.empty()) j["out"] = o.out_dir;
  if (const char* env_out = std::getenv("ALTREG_OUT")) j["out"] = env_out;
  if (o.seed) j["seed"] = *o.seed;
  if (!o.horizons.empty()) {
    j.erase("horizon");
    j["horizons"] = o.horizons;
  }
  if (!o.learner.empty()) j["learner"]["kind"] = o.learner;
  if (!o.env.empty()) j["env"]["kind"] = o.env;
  if (!o.eta.empty()) {
    if (o.eta == "paper")
      j["learner"]["eta"] = "paper";
    else
      j["learner"]["eta"] = std::stod(o.eta);
  }
  if (o.jobs) j["jobs"] = *o.jobs;
  return j;
}

int cmd_run(const CliOverrides& o) {
  ExperimentConfig cfg =
      ExperimentConfig::from_json(apply_overrides(load_config(o.config_path), o));
  RunResult res = run_experiment(cfg, cfg.horizons.front());
  write_file(cfg.out_dir + "/trace.csv", trace_csv(res.rows));
  write_file(cfg.out_dir + "/summary.json", res.summary.dump(2) + "\n");
  std::cout << "T=" << res.horizon << " eta=" << format_double(res.eta)
            << " reg_std=" << format_double(res.reg_std)
            << " reg_cht=" << format_double(res.reg_cht)
            << " reg_alt=" << format_double(res.reg_alt) << "\n";
  std::cout << "wrote " << cfg.out_dir << "/trace.csv, summary.json\n";
  return 0;
}

int cmd_sweep(const CliOverrides& o) {
  ExperimentConfig cfg =
      ExperimentConfig::from_json(apply_overrides(load_config(o.config_path), o));
  SweepResult res = run_sweep(cfg);
  write_file(cfg.out_dir + "/rates.csv", rates_csv(res.points));
  nlohmann::json fit;
  fit["slope"] = res.fit.slope;
  fit["intercept"] = res.fit.intercept;
  fit["r2"] = res.fit.r2;
  fit["excluded"] = res.fit.excluded;
  fit["config"] = cfg.to_json();
  write_file(cfg.out_dir + "/fit.json", fit.dump(2) + "\n");
  std::cout << "T,reg_alt\n";
  for (const auto& p : res.points)
    std::cout << p.T << "," << format_double(p.value) << "\n";
  std::cout << "slope=" << format_double(res.fit.slope)
            << " r2=" << format_double(res.fit.r2) << "\n";
  return 0;
}

std::unique_ptr<Learner> learner_from_json(const nlohmann::json& j,
                                           const Domain& dom, std::int64_t T) {
  LearnerSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  if (j.contains("eta") && !j["eta"].is_string())
    spec.eta = j["eta"].get<double>();
  if (j.contains("point")) {
    auto v = j["point"].get<std::vector<double>>();
    spec.point = Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const double eta = spec.eta ? *spec.eta : paper_eta(spec, dom, {}, T);
  return make_learner(spec, dom, eta);
}

int cmd_dynamics(const CliOverrides& o) {
  nlohmann::json j = load_config(o.config_path);
  if (!o.out_dir.empty()) j["out"] = o.out_dir;
  if (const char* env_out = std::getenv("ALTREG_OUT")) j["out"] = env_out;
  if (!j.contains("game")) throw ValidationError("game", "missing");
  nlohmann::json game_json = j["game"];
  if (game_json.is_string()) game_json = nlohmann::json::parse(read_file(game_json));
  Game game = Game::from_json(game_json.dump());
  const std::int64_t T = j.at("horizon").get<std::int64_t>();
  const std::string out = j.value("out", std::string("out"));

  auto alg_x = learner_from_json(j.at("learner_x"), game.x_domain(), T);
  auto alg_y = learner_from_json(j.at("learner_y"), game.y_domain(), T);
  DynamicTrace trace = run_alternating(game, *alg_x, *alg_y, T);

  const double rax = trace.ledger_x.reg_alt();
  const double ray = trace.ledger_y.reg_alt();
  nlohmann::json s;
  s["horizon"] = T;
  s["zero_sum"] = game.zero_sum();
  s["rescale_factor"] = game.rescale_factor();
  s["reg_alt_x"] = rax;
  s["reg_alt_y"] = ray;
  const double cce = cce_gap(game, trace);
  const double cce_bound = (std::max(rax, ray) + 4.0) / (2.0 * T);
  s["cce_gap"] = cce;
  s["cce_bound"] = cce_bound;
  s["cce_slack"] = cce_bound - cce;
  if (game.zero_sum()) {
    const double gap = ne_gap(game, trace.x_average(), trace.y_average());
    const double bound = (rax + ray + 2.0) / (2.0 * T);
    s["ne_gap"] = gap;
    s["ne_bound"] = bound;
    s["ne_slack"] = bound - gap;
    std::cout << "ne_gap=" << format_double(gap)
              << " bound=" << format_double(bound) << "\n";
  }
  std::cout << "cce_gap=" << format_double(cce)
            << " bound=" << format_double(cce_bound) << "\n";

  auto dump_player = [&](const RegretLedger& ledger,
                         const std::vector<Vector>& decisions,
                         const std::string& name) {
    std::vector<TraceRow> rows;
    double cum_std = 0, cum_cht = 0, cum_comp = 0;
    const Vector u = ledger.best().point;
    for (std::int64_t t = 1; t <= ledger.rounds(); ++t) {
      const std::size_t i = static_cast<std::size_t>(t - 1);
      cum_std += ledger.per_round_standard()[i];
      cum_cht += ledger.per_round_cheating()[i];
      cum_comp += ledger.losses()[i].eval(u);
      TraceRow row;
      row.t = t;
      row.x = decisions[i];
      row.loss_value = ledger.per_round_standard()[i];
      row.reg_std = cum_std - cum_comp;
      row.reg_cht = cum_cht - cum_comp;
      row.reg_alt = row.reg_std + row.reg_cht;
      rows.push_back(std::move(row));
    }
    write_file(out + "/trace_" + name + ".csv", trace_csv(rows));
  };
  dump_player(trace.ledger_x, trace.x, "x");
  // The y-player's round-s standard decision is y_{s-1}.
  dump_player(trace.ledger_y, trace.y, "y");
  write_file(out + "/summary.json", s.dump(2) + "\n");
  std::cout << "wrote " << out << "/trace_x.csv, trace_y.csv, summary.json\n";
  return 0;
}

int cmd_verify() {
  const auto rows = verify_oracles();
  bool all = true;
  for (const auto& r : rows) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
    all = all && r.pass;
  }
  std::cout << (all ? "all oracle checks passed\n" : "oracle checks FAILED\n");
  return all ? 0 : kExitAssertion;
}

int cmd_fit(const std::string& rates_path) {
  const auto points = rates_from_csv(read_file(rates_path));
  const RateFit fit = fit_rate(points);
  std::cout << "points=" << points.size() << " excluded=" << fit.excluded
            << " slope=" << format_double(fit.slope)
            << " intercept=" << format_double(fit.intercept)
            << " r2=" << format_double(fit.r2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alternating-regret experiment runner"};
  app.require_subcommand(1);

  CliOverrides o;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "PRNG seed");
    cmd->add_option("--horizons", o.horizons, "comma-separated horizons")
        ->delimiter(',');
    cmd->add_option("--eta", o.eta, "learning rate (number or 'paper')");
    cmd->add_option("--learner", o.learner, "learner kind");
    cmd->add_option("--env", o.env, "environment kind");
    cmd->add_option("--jobs", o.jobs, "parallel sweep workers");
  };

  auto* run = app.add_subcommand("run", "single experiment; writes trace + summary");
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "horizon sweep with a rate fit");
  add_common(sweep);
  auto* dynamics =
      app.add_subcommand("dynamics", "alternating two-player game dynamic");
  dynamics->add_option("--config", o.config_path, "JSON config file")->required();
  dynamics->add_option("--out", o.out_dir, "output directory");
  auto* verify =
      app.add_subcommand("verify", "closed-form oracle checks, pass/fail table");
  std::string rates_path;
  auto* fit = app.add_subcommand("fit", "fit a power law to an existing rate CSV");
  fit->add_option("--rates", rates_path, "CSV with T,value rows")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (dynamics->parsed()) return cmd_dynamics(o);
    if (verify->parsed()) return cmd_verify();
    if (fit->parsed()) return cmd_fit(rates_path);
  } catch (const altreg::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const altreg::ConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const altreg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssertion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
