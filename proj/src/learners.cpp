#include "altreg/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "altreg/solvers.hpp"

namespace altreg {

namespace {

constexpr std::int64_t kRecenterPeriod = 10000;

const Vector& require_linear(const LossFn& f, const char* who) {
  if (f.kind() != LossKind::Linear)
    throw ValidationError("loss", std::string(who) + " requires linear losses");
  return f.ell();
}

}  // namespace

// ---------------------------------------------------------------------------
// Hedge

Hedge::Hedge(int d, double eta)
    : dom_(Domain::simplex(d)), eta_(eta), cum_loss_(Vector::Zero(d)) {
  if (!(eta > 0)) throw ValidationError("eta", "must be positive");
}

const Vector& Hedge::act() {
  if (!fresh_) {
    const double m = cum_loss_.minCoeff();
    decision_ = (-eta_ * (cum_loss_.array() - m)).exp();
    decision_ /= decision_.sum();
    fresh_ = true;
  }
  return decision_;
}

void Hedge::observe(const LossFn& f) {
  const Vector& ell = require_linear(f, "hedge");
  if (ell.size() != cum_loss_.size())
    throw DimensionError("hedge observe: dimension mismatch");
  cum_loss_ += ell;
  ++observed_;
  if (observed_ % kRecenterPeriod == 0)
    cum_loss_.array() -= cum_loss_.minCoeff();
  fresh_ = false;
}

// ---------------------------------------------------------------------------
// FTRL

Ftrl::Ftrl(Domain dom, Regularizer reg, double eta)
    : dom_(std::move(dom)), reg_(std::move(reg)), eta_(eta) {
  if (!(eta > 0)) throw ValidationError("eta", "must be positive");
  switch (dom_.kind()) {
    case DomainKind::Ball:
      if (reg_.kind() != RegularizerKind::BallBarrier ||
          reg_.dim() != dom_.dimension() || dom_.radius() != 1.0)
        throw ValidationError("regularizer",
                              "ball domain needs a unit ball with BallBarrier");
      break;
    case DomainKind::Simplex:
      if (reg_.kind() != RegularizerKind::SimplexEntropy ||
          reg_.dim() != dom_.dimension() - 1)
        throw ValidationError("regularizer",
                              "simplex domain needs SimplexEntropy of matching size");
      break;
    default:
      throw ValidationError("domain", "ftrl supports ball and simplex domains");
  }
  const int d = dom_.dimension();
  quad_sum_ = Matrix::Zero(d, d);
  lin_sum_ = Vector::Zero(d);
  iterate_ = reg_.domain_center();
}

Vector Ftrl::to_coordinates(const Vector& x) const {
  return dom_.kind() == DomainKind::Simplex ? simplex_embed(x) : x;
}

Vector Ftrl::from_coordinates(const Vector& z) const {
  return dom_.kind() == DomainKind::Simplex ? simplex_lift(z) : z;
}

double Ftrl::loss_value(const Vector& x_full) const {
  double v = x_full.dot(quad_sum_ * x_full) + lin_sum_.dot(x_full) + const_sum_;
  for (const auto& f : black_box_) v += f.eval(x_full);
  return v;
}

Vector Ftrl::loss_grad(const Vector& x_full) const {
  Vector g = 2.0 * quad_sum_ * x_full + lin_sum_;
  for (const auto& f : black_box_) g += f.grad(x_full);
  return g;
}

Matrix Ftrl::loss_hess(const Vector& x_full) const {
  Matrix h = 2.0 * quad_sum_;
  for (const auto& f : black_box_) h += f.hess(x_full);
  return h;
}

void Ftrl::solve() {
  const bool embedded = dom_.kind() == DomainKind::Simplex;
  const int d = dom_.dimension();
  Objective obj;
  obj.value = [this, embedded](const Vector& z) {
    return loss_value(embedded ? simplex_lift(z) : z) + reg_.raw_value(z) / eta_;
  };
  obj.grad = [this, embedded, d](const Vector& z) {
    Vector gf = loss_grad(embedded ? simplex_lift(z) : z);
    Vector g = embedded
                   ? Vector(gf.head(d - 1).array() - gf[d - 1])
                   : gf;
    return Vector(g + reg_.raw_grad(z) / eta_);
  };
  obj.hess = [this, embedded, d](const Vector& z) {
    Matrix hf = loss_hess(embedded ? simplex_lift(z) : z);
    Matrix h;
    if (embedded) {
      h.resize(d - 1, d - 1);
      for (int i = 0; i < d - 1; ++i)
        for (int j = 0; j < d - 1; ++j)
          h(i, j) = hf(i, j) - hf(i, d - 1) - hf(d - 1, j) + hf(d - 1, d - 1);
    } else {
      h = hf;
    }
    return Matrix(h + reg_.raw_hess(z) / eta_);
  };
  auto interior = [this](const Vector& z) { return reg_.interior(z, 0.0); };
  Vector warm = interior(iterate_) ? iterate_ : reg_.domain_center();
  try {
    iterate_ = damped_newton(obj, interior, warm);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("ftrl inner solve failed", e.residual(), observed_ + 1);
  }
}

const Vector& Ftrl::act() {
  if (!fresh_) {
    if (observed_ == 0)
      iterate_ = reg_.domain_center();
    else
      solve();
    decision_ = from_coordinates(iterate_);
    fresh_ = true;
  }
  return decision_;
}

void Ftrl::observe(const LossFn& f) {
  if (f.dim() != dom_.dimension())
    throw DimensionError("ftrl observe: dimension mismatch");
  switch (f.kind()) {
    case LossKind::Linear:
      lin_sum_ += f.ell();
      break;
    case LossKind::Quadratic:
      quad_sum_ += f.quad_matrix();
      lin_sum_ += f.quad_linear();
      const_sum_ += f.quad_constant();
      break;
    case LossKind::BlackBox:
      black_box_.push_back(f);
      break;
  }
  ++observed_;
  fresh_ = false;
}

std::function<double(const Vector&)> Ftrl::objective_value_fn() const {
  const bool embedded = dom_.kind() == DomainKind::Simplex;
  return [reg = reg_, eta = eta_, A = quad_sum_, b = lin_sum_, c = const_sum_,
          bb = black_box_, embedded](const Vector& z) {
    Vector x = embedded ? simplex_lift(z) : z;
    double v = x.dot(A * x) + b.dot(x) + c;
    for (const auto& f : bb) v += f.eval(x);
    return v + reg.raw_value(z) / eta;
  };
}

std::function<Vector(const Vector&)> Ftrl::objective_grad_fn() const {
  const bool embedded = dom_.kind() == DomainKind::Simplex;
  const int d = dom_.dimension();
  return [reg = reg_, eta = eta_, A = quad_sum_, b = lin_sum_, bb = black_box_,
          embedded, d](const Vector& z) {
    Vector x = embedded ? simplex_lift(z) : z;
    Vector gf = 2.0 * A * x + b;
    for (const auto& f : bb) gf += f.grad(x);
    Vector g = embedded ? Vector(gf.head(d - 1).array() - gf[d - 1]) : gf;
    return Vector(g + reg.raw_grad(z) / eta);
  };
}

// ---------------------------------------------------------------------------
// Continuous Hedge

ContinuousHedge::ContinuousHedge(Domain dom, double eta)
    : dom_(std::move(dom)), eta_(eta) {
  if (!(eta > 0)) throw ValidationError("eta", "must be positive");
  const bool supported = (dom_.kind() == DomainKind::Interval ||
                          dom_.kind() == DomainKind::Ball ||
                          dom_.kind() == DomainKind::Box) &&
                         dom_.dimension() <= 2;
  if (!supported)
    throw DimensionError(
        "continuous hedge supports interval, ball and box domains with d <= 2");
  const int d = dom_.dimension();
  quad_sum_ = Matrix::Zero(d, d);
  lin_sum_ = Vector::Zero(d);
}

double ContinuousHedge::loss_value(const Vector& x) const {
  double v = x.dot(quad_sum_ * x) + lin_sum_.dot(x) + const_sum_;
  for (const auto& f : black_box_) v += f.eval(x);
  return v;
}

namespace {

// Composite Gauss-Legendre rule with 32-point panels.
void composite_rule(double lo, double hi, int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  constexpr int kPanelOrder = 32;
  const int panels = std::max(1, n / kPanelOrder);
  static thread_local std::vector<double> base_x, base_w;
  if (base_x.empty()) gauss_legendre(kPanelOrder, base_x, base_w);
  nodes.clear();
  weights.clear();
  nodes.reserve(panels * kPanelOrder);
  weights.reserve(panels * kPanelOrder);
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double mid = a + 0.5 * width, half = 0.5 * width;
    for (int i = 0; i < kPanelOrder; ++i) {
      nodes.push_back(mid + half * base_x[i]);
      weights.push_back(half * base_w[i]);
    }
  }
}

}  // namespace

Vector ContinuousHedge::gibbs_mean(int nodes_per_axis) const {
  const int d = dom_.dimension();
  const double lo = dom_.kind() == DomainKind::Ball ? -dom_.radius() : dom_.lo();
  const double hi = dom_.kind() == DomainKind::Ball ? dom_.radius() : dom_.hi();
  std::vector<double> xs, ws;
  composite_rule(lo, hi, nodes_per_axis, xs, ws);
  const int n = static_cast<int>(xs.size());

  if (d == 1) {
    Vector pt(1);
    double fmin = std::numeric_limits<double>::infinity();
    std::vector<double> fv(n);
    for (int i = 0; i < n; ++i) {
      pt[0] = xs[i];
      fv[i] = loss_value(pt);
      fmin = std::min(fmin, fv[i]);
    }
    double z = 0.0, num = 0.0;
    for (int i = 0; i < n; ++i) {
      double w = ws[i] * std::exp(-eta_ * (fv[i] - fmin));
      z += w;
      num += w * xs[i];
    }
    Vector mean(1);
    mean[0] = num / z;
    return mean;
  }

  const bool ball = dom_.kind() == DomainKind::Ball;
  const double r2 = ball ? dom_.radius() * dom_.radius() : 0.0;
  Vector pt(2);
  double fmin = std::numeric_limits<double>::infinity();
  std::vector<double> fv(static_cast<std::size_t>(n) * n,
                         std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (ball && xs[i] * xs[i] + xs[j] * xs[j] > r2) continue;
      pt << xs[i], xs[j];
      double v = loss_value(pt);
      fv[static_cast<std::size_t>(i) * n + j] = v;
      fmin = std::min(fmin, v);
    }
  }
  double z = 0.0, num0 = 0.0, num1 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = fv[static_cast<std::size_t>(i) * n + j];
      if (std::isnan(v)) continue;
      double w = ws[i] * ws[j] * std::exp(-eta_ * (v - fmin));
      z += w;
      num0 += w * xs[i];
      num1 += w * xs[j];
    }
  }
  Vector mean(2);
  mean << num0 / z, num1 / z;
  return mean;
}

const Vector& ContinuousHedge::act() {
  if (!fresh_) {
    if (dom_.dimension() == 1) {
      decision_ = gibbs_mean(2048);
    } else {
      Vector coarse = gibbs_mean(256);
      Vector fine = gibbs_mean(512);
      double delta = (fine - coarse).cwiseAbs().maxCoeff();
      if (delta >= 1e-7)
        throw ConvergenceError("continuous hedge quadrature did not converge",
                               delta, observed_ + 1);
      decision_ = fine;
    }
    decision_ = dom_.project(decision_);
    fresh_ = true;
  }
  return decision_;
}

void ContinuousHedge::observe(const LossFn& f) {
  if (f.dim() != dom_.dimension())
    throw DimensionError("continuous hedge observe: dimension mismatch");
  switch (f.kind()) {
    case LossKind::Linear:
      lin_sum_ += f.ell();
      break;
    case LossKind::Quadratic:
      quad_sum_ += f.quad_matrix();
      lin_sum_ += f.quad_linear();
      const_sum_ += f.quad_constant();
      break;
    case LossKind::BlackBox:
      black_box_.push_back(f);
      break;
  }
  ++observed_;
  fresh_ = false;
}

// ---------------------------------------------------------------------------
// OOGD

Oogd::Oogd(int d, double eta)
    : dom_(Domain::simplex(d)),
      eta_(eta),
      p_hat_(Vector::Constant(d, 1.0 / d)),
      m_(Vector::Zero(d)) {
  if (!(eta > 0)) throw ValidationError("eta", "must be positive");
}

const Vector& Oogd::act() {
  if (!fresh_) {
    decision_ = project_simplex(p_hat_ - eta_ * m_);
    fresh_ = true;
  }
  return decision_;
}

void Oogd::observe(const LossFn& f) {
  const Vector& ell = require_linear(f, "oogd");
  if (ell.size() != p_hat_.size())
    throw DimensionError("oogd observe: dimension mismatch");
  p_hat_ = project_simplex(p_hat_ - eta_ * ell);
  m_ = ell;
  ++observed_;
  fresh_ = false;
}

// ---------------------------------------------------------------------------
// PRM+

PrmPlus::PrmPlus(int d)
    : dom_(Domain::simplex(d)),
      R_(Vector::Zero(d)),
      r_prev_(Vector::Zero(d)),
      R_hat_(Vector::Zero(d)) {}

const Vector& PrmPlus::act() {
  if (!fresh_) {
    R_hat_ = (R_ + r_prev_).cwiseMax(0.0);
    double norm1 = R_hat_.sum();
    if (norm1 > 0.0)
      decision_ = R_hat_ / norm1;
    else
      decision_ = Vector::Constant(R_.size(), 1.0 / R_.size());
    fresh_ = true;
  }
  return decision_;
}

void PrmPlus::observe(const LossFn& f) {
  const Vector& ell = require_linear(f, "prm+");
  if (ell.size() != R_.size())
    throw DimensionError("prm+ observe: dimension mismatch");
  act();  // r_t is defined through the decision actually played
  Vector r = Vector::Constant(ell.size(), decision_.dot(ell)) - ell;
  R_ = (R_ + r).cwiseMax(0.0);
  r_prev_ = r;
  ++observed_;
  fresh_ = false;
}

// ---------------------------------------------------------------------------
// Constant

ConstantLearner::ConstantLearner(Domain dom, Vector point)
    : dom_(std::move(dom)), point_(std::move(point)) {
  if (!dom_.contains(point_, 1e-9))
    throw DomainError("constant learner: point outside the domain");
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

}  // namespace altreg
