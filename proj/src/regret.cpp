#include "altreg/regret.hpp"

#include <cmath>

#include "altreg/solvers.hpp"

namespace altreg {

BestFixed best_fixed(const std::vector<LossFn>& losses, const Domain& dom) {
  if (losses.empty()) throw ValidationError("losses", "empty sequence");
  const int d = dom.dimension();
  bool all_linear = true, quadratic_only = true;
  for (const auto& f : losses) {
    if (f.dim() != d) throw DimensionError("best_fixed: dimension mismatch");
    if (f.kind() != LossKind::Linear) all_linear = false;
    if (f.kind() == LossKind::BlackBox) quadratic_only = false;
  }

  if (all_linear) {
    Vector g = Vector::Zero(d);
    for (const auto& f : losses) g += f.ell();
    auto r = minimize_linear(g, dom);
    return {r.point, r.value};
  }

  if (quadratic_only) {
    Matrix A = Matrix::Zero(d, d);
    Vector b = Vector::Zero(d);
    double c = 0.0;
    for (const auto& f : losses) {
      if (f.kind() == LossKind::Quadratic) {
        A += f.quad_matrix();
        b += f.quad_linear();
        c += f.quad_constant();
      } else {
        b += f.ell();
      }
    }
    if (dom.kind() == DomainKind::Ball) {
      auto r = minimize_quadratic_ball(A, b, c, dom);
      return {r.point, r.value};
    }
    Objective obj;
    obj.value = [&](const Vector& x) { return x.dot(A * x) + b.dot(x) + c; };
    obj.grad = [&](const Vector& x) { return Vector(2.0 * A * x + b); };
    obj.hess = [&](const Vector&) { return Matrix(2.0 * A); };
    auto r = minimize_convex(obj, dom);
    return {r.point, r.value};
  }

  Objective obj;
  obj.value = [&](const Vector& x) {
    double v = 0.0;
    for (const auto& f : losses) v += f.eval(x);
    return v;
  };
  obj.grad = [&](const Vector& x) {
    Vector g = Vector::Zero(d);
    for (const auto& f : losses) g += f.grad(x);
    return g;
  };
  obj.hess = [&](const Vector& x) {
    Matrix h = Matrix::Zero(d, d);
    for (const auto& f : losses) h += f.hess(x);
    return h;
  };
  auto r = minimize_convex(obj, dom);
  return {r.point, r.value};
}

RegretLedger::RegretLedger(Domain dom) : dom_(std::move(dom)) {}

void RegretLedger::record(std::int64_t t, const Vector& x_t, const LossFn& f_t,
                          const Vector& x_next) {
  if (t != rounds_ + 1)
    throw ValidationError("t", "out-of-order record: expected round " +
                                   std::to_string(rounds_ + 1) + ", got " +
                                   std::to_string(t));
  if (f_t.dim() != dom_.dimension())
    throw DimensionError("record: loss dimension mismatch");
  const double ls = f_t.eval(x_t);
  const double lc = f_t.eval(x_next);
  std_loss_ += ls;
  cht_loss_ += lc;
  round_std_.push_back(ls);
  round_cht_.push_back(lc);
  losses_.push_back(f_t);
  ++rounds_;
  best_valid_ = false;
}

double RegretLedger::comparator_loss(const Vector& u) const {
  double v = 0.0;
  for (const auto& f : losses_) v += f.eval(u);
  return v;
}

const BestFixed& RegretLedger::best() const {
  if (!best_valid_) {
    best_ = best_fixed(losses_, dom_);
    best_valid_ = true;
  }
  return best_;
}

double hedge_identity_gap(const std::vector<Vector>& ps,
                          const std::vector<Vector>& ells, double eta,
                          const Vector& u) {
  if (ps.size() != ells.size() + 1)
    throw ValidationError("trace", "need T+1 decisions for T losses");
  if (ells.empty()) throw ValidationError("trace", "empty trace");
  const std::size_t T = ells.size();

  // The trace must actually come from Hedge at this eta: rebuild p_2.
  Vector p2 = ps[0].array() * (-eta * ells[0].array()).exp();
  p2 /= p2.sum();
  if ((p2 - ps[1]).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("trace", "decisions do not match Hedge at this eta");

  double direct = 0.0;
  for (std::size_t t = 0; t < T; ++t)
    direct += (ps[t] + ps[t + 1] - 2.0 * u).dot(ells[t]);

  double commutator_sum = 0.0;
  for (std::size_t t = 0; t < T; ++t)
    commutator_sum += kl(ps[t], ps[t + 1]) - kl(ps[t + 1], ps[t]);
  const double rhs =
      2.0 * (kl(u, ps.front()) - kl(u, ps.back())) / eta + commutator_sum / eta;

  return std::abs(direct - rhs);
}

}  // namespace altreg
