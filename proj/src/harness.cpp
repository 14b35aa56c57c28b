#include "altreg/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "altreg/geometry.hpp"

namespace altreg {

RateFit fit_rate(const std::vector<RatePoint>& points) {
  std::vector<double> xs, ys;
  int excluded = 0;
  for (const auto& p : points) {
    if (p.T <= 0 || !(p.value > 0.0)) {
      ++excluded;
      continue;
    }
    xs.push_back(std::log(static_cast<double>(p.T)));
    ys.push_back(std::log(p.value));
  }
  if (xs.size() < 4)
    throw ValidationError("points", "need at least 4 positive points for a fit");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  RateFit fit;
  fit.excluded = excluded;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = fit.slope * xs[i] + fit.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

// ---------------------------------------------------------------------------
// Config

namespace {

void reject_unknown(const nlohmann::json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ValidationError(where + "." + item.key(), "unknown key");
  }
}

Vector read_vector(const nlohmann::json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Domain domain_from_json(const nlohmann::json& j, const std::string& where) {
  reject_unknown(j, where, {"kind", "d", "radius", "lo", "hi"});
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "simplex") return Domain::simplex(j.at("d").get<int>());
  if (kind == "ball")
    return Domain::ball(j.at("d").get<int>(), j.value("radius", 1.0));
  if (kind == "interval")
    return Domain::interval(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "box")
    return Domain::box(j.at("d").get<int>(), j.at("lo").get<double>(),
                       j.at("hi").get<double>());
  throw ValidationError(where + ".kind", "unknown kind '" + kind + "'");
}

nlohmann::json domain_to_json(const Domain& d) {
  nlohmann::json j;
  switch (d.kind()) {
    case DomainKind::Simplex:
      j["kind"] = "simplex";
      j["d"] = d.dimension();
      break;
    case DomainKind::Ball:
      j["kind"] = "ball";
      j["d"] = d.dimension();
      j["radius"] = d.radius();
      break;
    case DomainKind::Interval:
      j["kind"] = "interval";
      j["lo"] = d.lo();
      j["hi"] = d.hi();
      break;
    case DomainKind::Box:
      j["kind"] = "box";
      j["d"] = d.dimension();
      j["lo"] = d.lo();
      j["hi"] = d.hi();
      break;
  }
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  reject_unknown(j, "config",
                 {"learner", "env", "domain", "horizon", "horizons", "comparator",
                  "seed", "out", "jobs"});
  ExperimentConfig cfg;

  const auto& lj = j.at("learner");
  reject_unknown(lj, "learner", {"kind", "eta", "point"});
  cfg.learner.kind = lj.at("kind").get<std::string>();
  if (lj.contains("eta")) {
    if (lj["eta"].is_string()) {
      if (lj["eta"].get<std::string>() != "paper")
        throw ValidationError("learner.eta", "expected a number or \"paper\"");
    } else {
      cfg.learner.eta = lj["eta"].get<double>();
    }
  }
  if (lj.contains("point")) cfg.learner.point = read_vector(lj["point"]);

  const auto& ej = j.at("env");
  reject_unknown(ej, "env", {"kind", "d", "lo", "hi", "scale"});
  cfg.env.kind = ej.at("kind").get<std::string>();
  cfg.env.d = ej.value("d", 0);
  cfg.env.lo = ej.value("lo", 0.0);
  cfg.env.hi = ej.value("hi", 1.0);
  cfg.env.scale = ej.value("scale", 1.0);

  if (j.contains("domain")) cfg.domain = domain_from_json(j["domain"], "domain");
  if (j.contains("horizon")) cfg.horizons = {j["horizon"].get<std::int64_t>()};
  if (j.contains("horizons"))
    cfg.horizons = j["horizons"].get<std::vector<std::int64_t>>();
  if (j.contains("comparator")) {
    if (j["comparator"].is_string()) {
      if (j["comparator"].get<std::string>() != "best_fixed")
        throw ValidationError("comparator", "expected \"best_fixed\" or a point");
    } else {
      cfg.comparator = read_vector(j["comparator"]);
    }
  }
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.out_dir = j.value("out", std::string("out"));
  cfg.jobs = j.value("jobs", 1);
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> learners = {"hedge",  "ftrl",     "chedge",
                                                    "oogd",   "prm_plus", "constant"};
  if (std::find(learners.begin(), learners.end(), learner.kind) == learners.end())
    throw ValidationError("learner.kind", "unknown learner '" + learner.kind + "'");
  static const std::vector<std::string> envs = {"hedge_cycle", "hedge_constant",
                                                "pm_alternating", "random_bounded",
                                                "random_quadratic"};
  if (std::find(envs.begin(), envs.end(), env.kind) == envs.end())
    throw ValidationError("env.kind", "unknown environment '" + env.kind + "'");
  if (horizons.empty()) throw ValidationError("horizons", "at least one horizon");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 1) throw ValidationError("horizons", "must be positive");
    if (i > 0 && horizons[i] <= horizons[i - 1])
      throw ValidationError("horizons", "must be strictly increasing");
  }
  if (jobs < 1) throw ValidationError("jobs", "must be >= 1");
  if (learner.kind == "constant" && !learner.point)
    throw ValidationError("learner.point", "constant learner needs a point");
  if (domain) {
    std::optional<Domain> implied;
    if (env.kind == "hedge_cycle" || env.kind == "hedge_constant")
      implied = Domain::simplex(3);
    else if (env.kind == "pm_alternating")
      implied = Domain::simplex(2);
    if (implied && (domain->kind() != implied->kind() ||
                    domain->dimension() != implied->dimension()))
      throw ValidationError("domain", "conflicts with the environment's domain");
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["learner"]["kind"] = learner.kind;
  if (learner.eta)
    j["learner"]["eta"] = *learner.eta;
  else
    j["learner"]["eta"] = "paper";
  if (learner.point)
    j["learner"]["point"] =
        std::vector<double>(learner.point->data(),
                            learner.point->data() + learner.point->size());
  j["env"]["kind"] = env.kind;
  if (env.kind == "random_bounded") {
    j["env"]["d"] = env.d;
    j["env"]["lo"] = env.lo;
    j["env"]["hi"] = env.hi;
  } else if (env.kind == "random_quadratic") {
    j["env"]["d"] = env.d;
    j["env"]["scale"] = env.scale;
  }
  if (domain) j["domain"] = domain_to_json(*domain);
  j["horizons"] = horizons;
  if (comparator)
    j["comparator"] = std::vector<double>(comparator->data(),
                                          comparator->data() + comparator->size());
  else
    j["comparator"] = "best_fixed";
  j["seed"] = seed;
  j["out"] = out_dir;
  j["jobs"] = jobs;
  return j;
}

// ---------------------------------------------------------------------------
// Factories

Environment make_environment(const EnvSpec& spec, std::uint64_t seed) {
  if (spec.kind == "hedge_cycle") return Environment::hedge_cycle();
  if (spec.kind == "hedge_constant") return Environment::hedge_constant();
  if (spec.kind == "pm_alternating") return Environment::pm_alternating();
  if (spec.kind == "random_bounded")
    return Environment::random_bounded(spec.d, seed, spec.lo, spec.hi);
  if (spec.kind == "random_quadratic")
    return Environment::random_quadratic(spec.d, seed, spec.scale);
  throw ValidationError("env.kind", "unknown environment '" + spec.kind + "'");
}

Domain experiment_domain(const ExperimentConfig& cfg) {
  std::optional<Domain> implied;
  if (cfg.env.kind == "hedge_cycle" || cfg.env.kind == "hedge_constant")
    implied = Domain::simplex(3);
  else if (cfg.env.kind == "pm_alternating")
    implied = Domain::simplex(2);
  if (cfg.domain) {
    if (implied && (cfg.domain->kind() != implied->kind() ||
                    cfg.domain->dimension() != implied->dimension()))
      throw ValidationError("domain", "conflicts with the environment's domain");
    return *cfg.domain;
  }
  if (implied) return *implied;
  throw ValidationError("domain", "required for random environments");
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const Domain& dom,
                                      double eta) {
  if (spec.kind == "hedge") {
    if (dom.kind() != DomainKind::Simplex)
      throw ValidationError("learner", "hedge needs a simplex domain");
    return std::make_unique<Hedge>(dom.dimension(), eta);
  }
  if (spec.kind == "ftrl") {
    Regularizer reg = dom.kind() == DomainKind::Ball
                          ? Regularizer::ball_barrier(dom.dimension())
                          : Regularizer::simplex_entropy(dom.dimension());
    return std::make_unique<Ftrl>(dom, reg, eta);
  }
  if (spec.kind == "chedge") return std::make_unique<ContinuousHedge>(dom, eta);
  if (spec.kind == "oogd") {
    if (dom.kind() != DomainKind::Simplex)
      throw ValidationError("learner", "oogd needs a simplex domain");
    return std::make_unique<Oogd>(dom.dimension(), eta);
  }
  if (spec.kind == "prm_plus") {
    if (dom.kind() != DomainKind::Simplex)
      throw ValidationError("learner", "prm+ needs a simplex domain");
    return std::make_unique<PrmPlus>(dom.dimension());
  }
  if (spec.kind == "constant") {
    if (!spec.point) throw ValidationError("learner.point", "required");
    return std::make_unique<ConstantLearner>(dom, *spec.point);
  }
  throw ValidationError("learner.kind", "unknown learner '" + spec.kind + "'");
}

double paper_eta(const LearnerSpec& learner, const Domain& dom,
                 const std::vector<LossFn>& losses, std::int64_t horizon) {
  const double T = static_cast<double>(std::max<std::int64_t>(horizon, 2));
  if (learner.kind == "hedge")
    return std::pow(T, -1.0 / 3.0) *
           std::cbrt(std::log(static_cast<double>(dom.dimension())));
  if (learner.kind == "chedge")
    return std::min(1.0, std::pow(T, -1.0 / 3.0) *
                             std::cbrt(dom.dimension() * std::log(T)));
  if (learner.kind == "oogd") return 1.0 / std::sqrt(T);
  if (learner.kind == "ftrl") {
    double L = 0.0, beta = 0.0, C = 0.0;
    for (const auto& f : losses) {
      Certified c = f.certify(dom);
      L = std::max(L, c.L);
      beta = std::max(beta, c.beta);
      C = std::max(C, c.C);
    }
    const double log_term = dom.kind() == DomainKind::Simplex
                                ? std::log(static_cast<double>(dom.dimension()))
                                : std::log(T);
    const double k2 = std::max(L * L * L + beta * L * L, 1e-12);
    const double cand2 = std::cbrt(log_term / k2) * std::pow(T, -1.0 / 3.0);
    if (C <= 0.0) return cand2;
    const double k1 = std::max(C * L * L * L, 1e-12);
    const double cand1 =
        std::pow(log_term, 0.4) * std::pow(k1, -0.4) * std::pow(T, -0.4);
    return std::min(cand1, cand2);
  }
  return 1.0;  // learners without a learning rate
}

// ---------------------------------------------------------------------------
// Run / sweep

RunResult run_experiment(const ExperimentConfig& cfg, std::int64_t horizon) {
  const auto t0 = std::chrono::steady_clock::now();
  const Domain dom = experiment_domain(cfg);
  const Environment env = make_environment(cfg.env, cfg.seed);
  if (env.dim() != dom.dimension())
    throw ValidationError("domain", "dimension conflicts with the environment");
  const std::int64_t n = env.effective_horizon(horizon);
  if (n < 1) throw ValidationError("horizon", "too short for this environment");
  const std::vector<LossFn> losses = env.sequence(horizon);

  const double eta = cfg.learner.eta ? *cfg.learner.eta
                                     : paper_eta(cfg.learner, dom, losses, n);
  auto learner = make_learner(cfg.learner, dom, eta);
  auto* ftrl = dynamic_cast<Ftrl*>(learner.get());
  const bool hedge_diag = cfg.learner.kind == "hedge";

  RegretLedger ledger(dom);
  std::vector<Vector> decisions;
  decisions.reserve(static_cast<std::size_t>(n) + 1);
  std::vector<std::optional<double>> commutators(static_cast<std::size_t>(n));

  for (std::int64_t t = 1; t <= n; ++t) {
    const Vector x_t = learner->act();
    decisions.push_back(x_t);
    const LossFn& f = losses[static_cast<std::size_t>(t - 1)];
    std::function<double(const Vector&)> obj_val;
    std::function<Vector(const Vector&)> obj_grad;
    if (ftrl) {
      obj_val = ftrl->objective_value_fn();
      obj_grad = ftrl->objective_grad_fn();
    }
    learner->observe(f);
    const Vector x_next = learner->act();
    ledger.record(t, x_t, f, x_next);
    if (hedge_diag) {
      commutators[static_cast<std::size_t>(t - 1)] =
          kl(x_t, x_next) - kl(x_next, x_t);
    } else if (ftrl) {
      const Vector zt = ftrl->to_coordinates(x_t);
      const Vector zn = ftrl->to_coordinates(x_next);
      commutators[static_cast<std::size_t>(t - 1)] =
          bregman(obj_val, obj_grad, zt, zn) - bregman(obj_val, obj_grad, zn, zt);
    }
  }
  decisions.push_back(learner->act());

  RunResult res;
  res.horizon = n;
  res.truncated = n != horizon;
  res.eta = eta;
  const BestFixed best = ledger.best();
  res.comparator = cfg.comparator ? *cfg.comparator : best.point;
  res.best_fixed_value = best.value;
  res.reg_std = ledger.reg_std(res.comparator);
  res.reg_cht = ledger.reg_cht(res.comparator);
  res.reg_alt = ledger.reg_alt(res.comparator);

  res.rows.reserve(static_cast<std::size_t>(n));
  double cum_std = 0.0, cum_cht = 0.0, cum_comp = 0.0, max_comm = 0.0;
  bool any_comm = false;
  for (std::int64_t t = 1; t <= n; ++t) {
    const std::size_t i = static_cast<std::size_t>(t - 1);
    cum_std += ledger.per_round_standard()[i];
    cum_cht += ledger.per_round_cheating()[i];
    cum_comp += losses[i].eval(res.comparator);
    TraceRow row;
    row.t = t;
    row.x = decisions[i];
    row.loss_value = ledger.per_round_standard()[i];
    row.reg_std = cum_std - cum_comp;
    row.reg_cht = cum_cht - cum_comp;
    row.reg_alt = row.reg_std + row.reg_cht;
    row.diag_commutator = commutators[i];
    if (commutators[i]) {
      any_comm = true;
      max_comm = std::max(max_comm, *commutators[i]);
    }
    res.rows.push_back(std::move(row));
  }
  if (any_comm) res.max_commutator = max_comm;

  res.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::json s;
  s["config"] = cfg.to_json();
  s["horizon_requested"] = horizon;
  s["horizon_effective"] = n;
  if (res.truncated)
    s["note"] = "horizon truncated to a whole number of environment periods";
  s["eta"] = eta;
  s["final"]["reg_std"] = res.reg_std;
  s["final"]["reg_cht"] = res.reg_cht;
  s["final"]["reg_alt"] = res.reg_alt;
  s["final"]["best_fixed_value"] = best.value;
  s["final"]["comparator"] = std::vector<double>(
      res.comparator.data(), res.comparator.data() + res.comparator.size());
  if (any_comm) s["diagnostics"]["max_commutator"] = max_comm;
  bool blackbox = false;
  for (const auto& f : losses)
    if (f.kind() == LossKind::BlackBox) blackbox = true;
  if (blackbox) s["diagnostics"]["blackbox_constants_trusted"] = true;
  s["wall_time_s"] = res.wall_time_s;
  res.summary = std::move(s);
  return res;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (cfg.horizons.size() < 4)
    throw ValidationError("horizons", "sweep needs at least 4 horizons");
  SweepResult out;
  out.runs.resize(cfg.horizons.size());
  const int jobs = std::max(1, cfg.jobs);
  std::size_t next = 0;
  while (next < cfg.horizons.size()) {
    const std::size_t batch =
        std::min<std::size_t>(jobs, cfg.horizons.size() - next);
    std::vector<std::future<RunResult>> futures;
    futures.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) {
      const std::int64_t T = cfg.horizons[next + k];
      futures.push_back(std::async(std::launch::async, [&cfg, T] {
        return run_experiment(cfg, T);
      }));
    }
    for (std::size_t k = 0; k < batch; ++k)
      out.runs[next + k] = futures[k].get();
    next += batch;
  }
  out.points.reserve(out.runs.size());
  for (const auto& r : out.runs) out.points.push_back({r.horizon, r.reg_alt});
  out.fit = fit_rate(out.points);
  return out;
}

// ---------------------------------------------------------------------------
// Formatting / files

std::string format_double(double v) {
  char buf[64];
  auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out;
  if (rows.empty()) return out;
  const auto d = rows.front().x.size();
  out += "t";
  for (Eigen::Index i = 0; i < d; ++i) out += ",x_" + std::to_string(i);
  out += ",loss_value,reg_std,reg_cht,reg_alt,diag_commutator\n";
  for (const auto& r : rows) {
    out += std::to_string(r.t);
    for (Eigen::Index i = 0; i < d; ++i) out += "," + format_double(r.x[i]);
    out += "," + format_double(r.loss_value);
    out += "," + format_double(r.reg_std);
    out += "," + format_double(r.reg_cht);
    out += "," + format_double(r.reg_alt);
    out += ",";
    if (r.diag_commutator) out += format_double(*r.diag_commutator);
    out += "\n";
  }
  return out;
}

std::string rates_csv(const std::vector<RatePoint>& points) {
  std::string out = "T,value\n";
  for (const auto& p : points)
    out += std::to_string(p.T) + "," + format_double(p.value) + "\n";
  return out;
}

std::vector<RatePoint> rates_from_csv(const std::string& text) {
  std::vector<RatePoint> out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("T,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError("rates", "expected 'T,value' rows");
    RatePoint p;
    p.T = std::stoll(line.substr(0, comma));
    p.value = std::stod(line.substr(comma + 1));
    out.push_back(p);
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path, "file does not exist");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Oracle verification table

namespace {

double simulated_reg_alt(Learner& learner, const Environment& env, std::int64_t T) {
  RegretLedger ledger(learner.domain());
  for (std::int64_t t = 1; t <= T; ++t) {
    const Vector x_t = learner.act();
    const LossFn f = env.loss(t);
    learner.observe(f);
    ledger.record(t, x_t, f, learner.act());
  }
  return ledger.reg_alt();
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::vector<VerifyRow> verify_oracles() {
  std::vector<VerifyRow> rows;
  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    rows.push_back({name, pass, detail});
  };

  for (double eta : {0.1, 0.5, 1.0}) {
    const std::int64_t cycles = 1000;
    Hedge h(3, eta);
    const double sim = simulated_reg_alt(h, Environment::hedge_cycle(), 3 * cycles);
    const double oracle = hedge_cycle_regret_oracle(eta, cycles);
    const double rel = std::abs(sim - oracle) / std::abs(oracle);
    check("hedge cycle closed form, eta=" + fmt(eta), rel <= 1e-9,
          "relative error " + fmt(rel));
    if (eta <= 1.0)
      check("hedge cycle lower bound, eta=" + fmt(eta),
            oracle >= eta * eta * cycles / 108.0,
            "oracle " + fmt(oracle) + " vs " + fmt(eta * eta * cycles / 108.0));
  }

  for (double eta : {0.05, 0.2, 1.0}) {
    const std::int64_t T = 1000;
    Hedge h(3, eta);
    const double sim = simulated_reg_alt(h, Environment::hedge_constant(), T);
    const double oracle = hedge_constant_regret_oracle(eta, T);
    const double rel = std::abs(sim - oracle) / std::abs(oracle);
    check("hedge constant closed form, eta=" + fmt(eta), rel <= 1e-9,
          "relative error " + fmt(rel));
    if (eta >= 2.0 / T && eta <= 1.0)
      check("hedge constant lower bound, eta=" + fmt(eta),
            oracle >= std::exp(-1.0) / (3.0 * eta),
            "oracle " + fmt(oracle) + " vs " + fmt(std::exp(-1.0) / (3.0 * eta)));
  }

  {
    const double eta = 0.01;
    const std::int64_t T = 10000;
    Oogd learner(2, eta);
    Environment env = Environment::pm_alternating();
    double worst = 0.0;
    for (std::int64_t t = 1; t <= T; ++t) {
      const Vector p = learner.act();
      const OogdIterate oracle = oogd_iterate_oracle(eta, t);
      if (!oracle.transition)
        worst = std::max(worst, (p - oracle.p).cwiseAbs().maxCoeff());
      learner.observe(env.loss(t));
    }
    check("oogd closed-form iterates, eta=0.01", worst <= 1e-12,
          "max deviation " + fmt(worst));
    Oogd fresh(2, eta);
    const double reg = simulated_reg_alt(fresh, env, T);
    const double formula = 1.0 / (2.0 * eta) + 2.0 * eta * T - 2.0 - 20.0 * eta;
    check("oogd regret formula, eta=0.01", std::abs(reg - formula) <= 40.0,
          "|" + fmt(reg) + " - " + fmt(formula) + "|");
  }

  {
    const double alpha5 = prm_alpha5_simulated();
    check("prm+ alpha5 from simulation", alpha5 > 2.0, "alpha5 " + fmt(alpha5));
    PrmPlus learner(2);
    Environment env = Environment::pm_alternating();
    double worst = 0.0;
    const std::int64_t k_max = 500;
    std::int64_t k_next = 5;
    double alpha = alpha5;
    for (std::int64_t t = 1; t <= 2 * k_max + 3; ++t) {
      const Vector p = learner.act();
      const std::int64_t k = (t - 1) / 2;
      if (t % 2 == 1 && k >= 5 && k <= k_max) {
        while (k_next < k) {
          alpha += 1.0 / (1.0 + alpha);
          ++k_next;
        }
        // p_{2k+1} = (0,1), R_{2k+3} and R-hat follow alpha_k.
        Vector expect(2);
        expect << 0.0, 1.0;
        worst = std::max(worst, (p - expect).cwiseAbs().maxCoeff());
        Vector rh = learner.predicted_state();
        Vector r_expect(2);
        if (t >= 13) {  // R-hat_{2k+1} = (0, 4 alpha_{k-1} + 8/(1+alpha_{k-1}))
          double a_prev = prm_alpha_oracle(alpha5, k - 1);
          r_expect << 0.0, 4.0 * a_prev + 8.0 / (1.0 + a_prev);
          worst = std::max(worst, (rh - r_expect).cwiseAbs().maxCoeff());
        }
      }
      learner.observe(env.loss(t));
    }
    check("prm+ state closed forms, k <= 500", worst <= 1e-9,
          "max deviation " + fmt(worst));
    double a = alpha5;
    bool bound_ok = true;
    for (std::int64_t k = 5; k <= 1000000; ++k) {
      if (a > 2.0 * std::sqrt(static_cast<double>(k)) - 1.0) {
        bound_ok = false;
        break;
      }
      a += 1.0 / (1.0 + a);
    }
    check("prm+ alpha_k <= 2 sqrt(k) - 1 up to 1e6", bound_ok, "");
    PrmPlus fresh(2);
    const std::int64_t T = 4096;
    RegretLedger ledger(fresh.domain());
    double first10 = 0.0;
    for (std::int64_t t = 1; t <= T; ++t) {
      const Vector x_t = fresh.act();
      const LossFn f = env.loss(t);
      fresh.observe(f);
      ledger.record(t, x_t, f, fresh.act());
      if (t <= 10)
        first10 += ledger.per_round_standard().back() +
                   ledger.per_round_cheating().back();
    }
    double series = 0.0;
    for (std::int64_t k = 5; k <= T / 2; ++k)
      series += 1.0 / std::sqrt(static_cast<double>(k));
    check("prm+ regret vs sqrt series", ledger.reg_alt() >= first10 + series,
          fmt(ledger.reg_alt()) + " >= " + fmt(first10 + series));
  }

  return rows;
}

}  // namespace altreg
