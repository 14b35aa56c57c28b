#include "altreg/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "altreg/solvers.hpp"

namespace altreg {

namespace {

// u(x, y) restricted to x for fixed y (quadratic payoff over stacked (x, y)).
LossFn restrict_to_x(const QuadraticPayoff& p, int nx, int ny, const Vector& y) {
  Matrix Qxx = p.Q.topLeftCorner(nx, nx);
  Matrix Qxy = p.Q.topRightCorner(nx, ny);
  Matrix Qyx = p.Q.bottomLeftCorner(ny, nx);
  Vector lin = Qxy * y + Qyx.transpose() * y + p.q.head(nx);
  double cst = y.dot(p.Q.bottomRightCorner(ny, ny) * y) + p.q.tail(ny).dot(y) + p.c;
  return LossFn::quadratic(Qxx, lin, cst);
}

LossFn restrict_to_y(const QuadraticPayoff& p, int nx, int ny, const Vector& x) {
  Matrix Qyy = p.Q.bottomRightCorner(ny, ny);
  Matrix Qxy = p.Q.topRightCorner(nx, ny);
  Matrix Qyx = p.Q.bottomLeftCorner(ny, nx);
  Vector lin = Qxy.transpose() * x + Qyx * x + p.q.tail(ny);
  double cst = x.dot(p.Q.topLeftCorner(nx, nx) * x) + p.q.head(nx).dot(x) + p.c;
  return LossFn::quadratic(Qyy, lin, cst);
}

double eval_quadratic_payoff(const QuadraticPayoff& p, const Vector& x,
                             const Vector& y) {
  Vector z(x.size() + y.size());
  z << x, y;
  return z.dot(p.Q * z) + p.q.dot(z) + p.c;
}

}  // namespace

Game Game::matrix_zero_sum(Matrix u1) {
  return matrix_general(u1, -u1);
}

Game Game::matrix_general(Matrix u1, Matrix u2) {
  if (u1.rows() != u2.rows() || u1.cols() != u2.cols())
    throw DimensionError("game: payoff shapes differ");
  if (u1.rows() < 2 || u1.cols() < 2)
    throw DimensionError("game: need at least 2 actions per player");
  Game g(GameKind::Matrix, Domain::simplex(static_cast<int>(u1.rows())),
         Domain::simplex(static_cast<int>(u1.cols())));
  g.A_ = std::move(u1);
  g.B_ = std::move(u2);
  g.validate_and_rescale();
  return g;
}

Game Game::convex_quadratic(QuadraticPayoff u1, QuadraticPayoff u2, Domain x_dom,
                            Domain y_dom) {
  const int nx = x_dom.dimension(), ny = y_dom.dimension();
  auto check = [&](QuadraticPayoff& p, const char* name) {
    if (p.Q.rows() != nx + ny || p.Q.cols() != nx + ny || p.q.size() != nx + ny)
      throw DimensionError(std::string("game: ") + name + " shape mismatch");
    p.Q = 0.5 * (p.Q + p.Q.transpose());
  };
  check(u1, "u1");
  check(u2, "u2");
  // Convexity in the own variable.
  Eigen::SelfAdjointEigenSolver<Matrix> ex(u1.Q.topLeftCorner(nx, nx));
  if (ex.eigenvalues().minCoeff() < -1e-9)
    throw ValidationError("u1", "must be convex in x");
  Eigen::SelfAdjointEigenSolver<Matrix> ey(u2.Q.bottomRightCorner(ny, ny));
  if (ey.eigenvalues().minCoeff() < -1e-9)
    throw ValidationError("u2", "must be convex in y");
  Game g(GameKind::ConvexQuadratic, std::move(x_dom), std::move(y_dom));
  g.qu1_ = std::move(u1);
  g.qu2_ = std::move(u2);
  g.validate_and_rescale();
  return g;
}

void Game::validate_and_rescale() {
  if (kind_ == GameKind::Matrix) {
    zero_sum_ = (A_ + B_).cwiseAbs().maxCoeff() <= 1e-12;
    // Bilinear over simplices peaks at vertex pairs, i.e. at matrix entries.
    double peak = std::max(A_.cwiseAbs().maxCoeff(), B_.cwiseAbs().maxCoeff());
    if (peak > 1.0) {
      rescale_ = peak;
      A_ /= peak;
      B_ /= peak;
    }
    return;
  }
  SplitMix64 rng(0x5eedULL);
  double peak = 0.0, gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vector x = x_dom_.sample(rng), y = y_dom_.sample(rng);
    double a = eval_quadratic_payoff(qu1_, x, y);
    double b = eval_quadratic_payoff(qu2_, x, y);
    peak = std::max({peak, std::abs(a), std::abs(b)});
    gap = std::max(gap, std::abs(a + b));
  }
  zero_sum_ = gap <= 1e-12;
  if (peak > 1.0) {
    rescale_ = peak;
    qu1_.Q /= peak;
    qu1_.q /= peak;
    qu1_.c /= peak;
    qu2_.Q /= peak;
    qu2_.q /= peak;
    qu2_.c /= peak;
  }
}

double Game::u1(const Vector& x, const Vector& y) const {
  if (kind_ == GameKind::Matrix) return x.dot(A_ * y);
  return eval_quadratic_payoff(qu1_, x, y);
}

double Game::u2(const Vector& x, const Vector& y) const {
  if (kind_ == GameKind::Matrix) return x.dot(B_ * y);
  return eval_quadratic_payoff(qu2_, x, y);
}

LossFn Game::loss_for_x(const Vector& y) const {
  if (kind_ == GameKind::Matrix) return LossFn::linear(A_ * y);
  return restrict_to_x(qu1_, x_dom_.dimension(), y_dom_.dimension(), y);
}

LossFn Game::loss_for_y(const Vector& x) const {
  if (kind_ == GameKind::Matrix) return LossFn::linear(B_.transpose() * x);
  return restrict_to_y(qu2_, x_dom_.dimension(), y_dom_.dimension(), x);
}

namespace {

double minimize_loss_over(const LossFn& f, const Domain& dom) {
  if (f.kind() == LossKind::Linear) return minimize_linear(f.ell(), dom).value;
  if (dom.kind() == DomainKind::Ball)
    return minimize_quadratic_ball(f.quad_matrix(), f.quad_linear(),
                                   f.quad_constant(), dom)
        .value;
  Objective obj;
  obj.value = [&](const Vector& v) { return f.eval(v); };
  obj.grad = [&](const Vector& v) { return f.grad(v); };
  obj.hess = [&](const Vector& v) { return f.hess(v); };
  return minimize_convex(obj, dom).value;
}

}  // namespace

double Game::best_response_value_x(const Vector& y) const {
  return minimize_loss_over(loss_for_x(y), x_dom_);
}

double Game::best_response_value_y(const Vector& x) const {
  return minimize_loss_over(loss_for_y(x), y_dom_);
}

Vector DynamicTrace::x_average() const {
  Vector avg = Vector::Zero(x.front().size());
  for (std::int64_t t = 0; t < horizon; ++t) avg += x[static_cast<std::size_t>(t)];
  return avg / static_cast<double>(horizon);
}

Vector DynamicTrace::y_average() const {
  Vector avg = Vector::Zero(y.front().size());
  // y_0 participates in the y-player's ledger, not the average.
  for (std::int64_t t = 1; t <= horizon; ++t) avg += y[static_cast<std::size_t>(t)];
  return avg / static_cast<double>(horizon);
}

DynamicTrace run_alternating(const Game& game, Learner& alg_x, Learner& alg_y,
                             std::int64_t T) {
  if (T < 1) throw ValidationError("T", "horizon must be positive");
  if (alg_x.domain().kind() != game.x_domain().kind() ||
      alg_x.domain().dimension() != game.x_domain().dimension() ||
      alg_y.domain().kind() != game.y_domain().kind() ||
      alg_y.domain().dimension() != game.y_domain().dimension())
    throw ValidationError("learners", "learner domains must match the game");

  DynamicTrace trace{{}, {}, RegretLedger(game.x_domain()),
                     RegretLedger(game.y_domain()), T};
  trace.x.reserve(static_cast<std::size_t>(T) + 1);
  trace.y.reserve(static_cast<std::size_t>(T) + 1);

  Vector y_prev = alg_y.act();  // y_0: output on an empty history
  trace.y.push_back(y_prev);

  for (std::int64_t t = 1; t <= T; ++t) {
    Vector x_t;
    try {
      x_t = alg_x.act();
      trace.x.push_back(x_t);
      LossFn g_t = game.loss_for_y(x_t);
      alg_y.observe(g_t);
      if (alg_y.observed() != alg_x.observed() + 1)
        throw Error("alternation order violated mid-round");
      Vector y_t = alg_y.act();
      trace.y.push_back(y_t);
      LossFn f_t = game.loss_for_x(y_t);
      alg_x.observe(f_t);
      Vector x_next = alg_x.act();
      trace.ledger_x.record(t, x_t, f_t, x_next);
      trace.ledger_y.record(t, y_prev, g_t, y_t);
      y_prev = std::move(y_t);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("alternating dynamic: learner failed", e.residual(), t);
    }
  }
  trace.x.push_back(alg_x.act());  // x_{T+1}
  return trace;
}

double ne_gap(const Game& game, const Vector& x_bar, const Vector& y_bar) {
  if (!game.zero_sum()) throw ValidationError("game", "ne_gap needs a zero-sum game");
  const double gain_x = game.u1(x_bar, y_bar) - game.best_response_value_x(y_bar);
  const double gain_y = game.u2(x_bar, y_bar) - game.best_response_value_y(x_bar);
  return std::max(gain_x, gain_y);
}

double cce_gap(const Game& game, const DynamicTrace& trace) {
  const std::int64_t T = trace.horizon;
  if (static_cast<std::int64_t>(trace.x.size()) != T + 1 ||
      static_cast<std::int64_t>(trace.y.size()) != T + 1)
    throw ValidationError("trace", "incomplete trace");

  double e_u1 = 0.0, e_u2 = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const Vector& xt = trace.x[static_cast<std::size_t>(t - 1)];
    const Vector& xn = trace.x[static_cast<std::size_t>(t)];
    const Vector& yt = trace.y[static_cast<std::size_t>(t)];
    e_u1 += game.u1(xt, yt) + game.u1(xn, yt);
    e_u2 += game.u2(xt, yt) + game.u2(xn, yt);
  }
  e_u1 /= 2.0 * T;
  e_u2 /= 2.0 * T;

  // Fixed deviations against the empirical marginals. Both atom families
  // share y_t, so the x-deviation sees the plain average of y_1..y_T; the
  // y-deviation sees the average of x_t and x_{t+1}.
  Vector y_marginal = Vector::Zero(trace.y.front().size());
  for (std::int64_t t = 1; t <= T; ++t) y_marginal += trace.y[static_cast<std::size_t>(t)];
  y_marginal /= static_cast<double>(T);
  Vector x_marginal = Vector::Zero(trace.x.front().size());
  for (std::int64_t t = 1; t <= T; ++t)
    x_marginal +=
        trace.x[static_cast<std::size_t>(t - 1)] + trace.x[static_cast<std::size_t>(t)];
  x_marginal /= 2.0 * static_cast<double>(T);

  double best_dev_x, best_dev_y;
  if (game.kind() == GameKind::Matrix) {
    best_dev_x = game.best_response_value_x(y_marginal);
    best_dev_y = game.best_response_value_y(x_marginal);
  } else {
    // Quadratic payoffs are not linear in the opponent marginal; average the
    // restricted losses over atoms instead.
    std::vector<LossFn> fx, fy;
    fx.reserve(static_cast<std::size_t>(T));
    fy.reserve(2 * static_cast<std::size_t>(T));
    for (std::int64_t t = 1; t <= T; ++t) {
      const Vector& yt = trace.y[static_cast<std::size_t>(t)];
      fx.push_back(game.loss_for_x(yt));
      fy.push_back(game.loss_for_y(trace.x[static_cast<std::size_t>(t - 1)]));
      fy.push_back(game.loss_for_y(trace.x[static_cast<std::size_t>(t)]));
    }
    best_dev_x = best_fixed(fx, game.x_domain()).value / static_cast<double>(T);
    best_dev_y = best_fixed(fy, game.y_domain()).value / (2.0 * static_cast<double>(T));
  }

  return std::max(0.0, std::max(e_u1 - best_dev_x, e_u2 - best_dev_y));
}

Game Game::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("game", std::string("invalid JSON: ") + e.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  auto read_matrix = [](const nlohmann::json& m) {
    auto rows = m.get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw ValidationError("game", "empty matrix");
    Matrix out(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size())
        throw ValidationError("game", "ragged matrix");
      for (std::size_t c = 0; c < rows[r].size(); ++c) out(r, c) = rows[r][c];
    }
    return out;
  };
  if (kind == "matrix") {
    Matrix u1 = read_matrix(j.at("u1"));
    if (j.contains("u2")) return matrix_general(u1, read_matrix(j.at("u2")));
    return matrix_zero_sum(u1);
  }
  if (kind == "quadratic") {
    auto read_domain = [](const nlohmann::json& d) {
      const std::string k = d.at("kind").get<std::string>();
      if (k == "ball") return Domain::ball(d.at("d").get<int>(),
                                           d.value("radius", 1.0));
      if (k == "interval")
        return Domain::interval(d.at("lo").get<double>(), d.at("hi").get<double>());
      if (k == "box")
        return Domain::box(d.at("d").get<int>(), d.at("lo").get<double>(),
                           d.at("hi").get<double>());
      if (k == "simplex") return Domain::simplex(d.at("d").get<int>());
      throw ValidationError("domain.kind", "unknown kind '" + k + "'");
    };
    auto read_payoff = [&](const nlohmann::json& p) {
      QuadraticPayoff out;
      out.Q = read_matrix(p.at("Q"));
      auto qv = p.at("q").get<std::vector<double>>();
      out.q = Eigen::Map<Vector>(qv.data(), qv.size());
      out.c = p.value("c", 0.0);
      return out;
    };
    return convex_quadratic(read_payoff(j.at("u1")), read_payoff(j.at("u2")),
                            read_domain(j.at("x_domain")),
                            read_domain(j.at("y_domain")));
  }
  throw ValidationError("game.kind", "unknown kind '" + kind + "'");
}

std::string Game::to_json() const {
  nlohmann::json j;
  auto dump_matrix = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(m.cols()));
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        row[static_cast<std::size_t>(c)] = m(r, c);
      rows.push_back(row);
    }
    return rows;
  };
  if (kind_ == GameKind::Matrix) {
    j["kind"] = "matrix";
    j["u1"] = dump_matrix(A_);
    j["u2"] = dump_matrix(B_);
  } else {
    j["kind"] = "quadratic";
    auto dump_payoff = [&](const QuadraticPayoff& p) {
      nlohmann::json out;
      out["Q"] = dump_matrix(p.Q);
      out["q"] = std::vector<double>(p.q.data(), p.q.data() + p.q.size());
      out["c"] = p.c;
      return out;
    };
    j["u1"] = dump_payoff(qu1_);
    j["u2"] = dump_payoff(qu2_);
    auto dump_domain = [](const Domain& d) {
      nlohmann::json out;
      switch (d.kind()) {
        case DomainKind::Simplex:
          out["kind"] = "simplex";
          out["d"] = d.dimension();
          break;
        case DomainKind::Ball:
          out["kind"] = "ball";
          out["d"] = d.dimension();
          out["radius"] = d.radius();
          break;
        case DomainKind::Interval:
          out["kind"] = "interval";
          out["lo"] = d.lo();
          out["hi"] = d.hi();
          break;
        case DomainKind::Box:
          out["kind"] = "box";
          out["d"] = d.dimension();
          out["lo"] = d.lo();
          out["hi"] = d.hi();
          break;
      }
      return out;
    };
    j["x_domain"] = dump_domain(x_dom_);
    j["y_domain"] = dump_domain(y_dom_);
  }
  j["zero_sum"] = zero_sum_;
  j["rescale_factor"] = rescale_;
  return j.dump();
}

}  // namespace altreg
