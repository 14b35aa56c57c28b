#include "altreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace altreg {

Domain Domain::simplex(int d) {
  if (d < 2) throw DimensionError("simplex needs d >= 2");
  return Domain(DomainKind::Simplex, d, 0.0, 0.0, 1.0);
}

Domain Domain::ball(int d, double radius) {
  if (d < 1) throw DimensionError("ball needs d >= 1");
  if (!(radius > 0)) throw ValidationError("radius", "must be positive");
  return Domain(DomainKind::Ball, d, radius, -radius, radius);
}

Domain Domain::interval(double lo, double hi) {
  if (!(lo < hi)) throw ValidationError("interval", "needs lo < hi");
  return Domain(DomainKind::Interval, 1, 0.0, lo, hi);
}

Domain Domain::box(int d, double lo, double hi) {
  if (d < 1) throw DimensionError("box needs d >= 1");
  if (!(lo < hi)) throw ValidationError("box", "needs lo < hi");
  return Domain(DomainKind::Box, d, 0.0, lo, hi);
}

bool Domain::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  switch (kind_) {
    case DomainKind::Simplex:
      return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
    case DomainKind::Ball:
      return x.norm() <= radius_ + tol;
    case DomainKind::Interval:
    case DomainKind::Box:
      return x.minCoeff() >= lo_ - tol && x.maxCoeff() <= hi_ + tol;
  }
  return false;
}

bool Domain::interior(const Vector& x, double margin) const {
  if (x.size() != dim_) return false;
  switch (kind_) {
    case DomainKind::Simplex:
      return x.minCoeff() > margin && x.sum() < 1.0 + 1e-12;
    case DomainKind::Ball:
      return x.norm() < radius_ - margin;
    case DomainKind::Interval:
    case DomainKind::Box:
      return x.minCoeff() > lo_ + margin && x.maxCoeff() < hi_ - margin;
  }
  return false;
}

Vector Domain::project(const Vector& v) const {
  if (v.size() != dim_) throw DimensionError("project: dimension mismatch");
  switch (kind_) {
    case DomainKind::Simplex:
      return project_simplex(v);
    case DomainKind::Ball: {
      double n = v.norm();
      if (n <= radius_) return v;
      return v * (radius_ / n);
    }
    case DomainKind::Interval:
    case DomainKind::Box: {
      Vector out = v;
      for (int i = 0; i < dim_; ++i) out[i] = std::clamp(out[i], lo_, hi_);
      return out;
    }
  }
  return v;
}

double Domain::diameter() const {
  switch (kind_) {
    case DomainKind::Simplex:
      return std::sqrt(2.0);
    case DomainKind::Ball:
      return 2.0 * radius_;
    case DomainKind::Interval:
      return hi_ - lo_;
    case DomainKind::Box:
      return (hi_ - lo_) * std::sqrt(static_cast<double>(dim_));
  }
  return 0.0;
}

Vector Domain::center() const {
  switch (kind_) {
    case DomainKind::Simplex:
      return Vector::Constant(dim_, 1.0 / dim_);
    case DomainKind::Ball:
      return Vector::Zero(dim_);
    case DomainKind::Interval:
    case DomainKind::Box:
      return Vector::Constant(dim_, 0.5 * (lo_ + hi_));
  }
  return Vector::Zero(dim_);
}

Vector Domain::sample(SplitMix64& rng) const {
  switch (kind_) {
    case DomainKind::Simplex: {
      // Exponential spacings normalized to the simplex.
      Vector e(dim_);
      for (int i = 0; i < dim_; ++i)
        e[i] = -std::log(1.0 - rng.next_double() + 1e-300);
      return e / e.sum();
    }
    case DomainKind::Ball: {
      for (;;) {
        Vector v = rng.uniform_vector(dim_, -1.0, 1.0);
        if (v.norm() <= 1.0) return v * radius_;
      }
    }
    case DomainKind::Interval:
    case DomainKind::Box:
      return rng.uniform_vector(dim_, lo_, hi_);
  }
  return Vector::Zero(dim_);
}

Vector project_simplex(const Vector& v) {
  const int d = static_cast<int>(v.size());
  if (d < 1) throw DimensionError("project_simplex: empty vector");
  if (!v.allFinite()) throw DomainError("project_simplex: non-finite input");
  std::vector<double> u(v.data(), v.data() + d);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssv = 0.0, tau = 0.0;
  int rho = 0;
  for (int j = 0; j < d; ++j) {
    cssv += u[j];
    double candidate = (cssv - 1.0) / (j + 1);
    if (u[j] > candidate) {
      rho = j + 1;
      tau = candidate;
    }
  }
  (void)rho;
  Vector out(d);
  for (int i = 0; i < d; ++i) out[i] = std::max(v[i] - tau, 0.0);
  return out;
}

double kl(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw DimensionError("kl: dimension mismatch");
  const double tol = 1e-9;
  if (std::abs(p.sum() - 1.0) > tol || std::abs(q.sum() - 1.0) > tol ||
      p.minCoeff() < -tol || q.minCoeff() < -tol)
    throw DomainError("kl: inputs must be simplex points");
  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;  // 0 ln 0 = 0
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

Vector shrink_comparator(const Vector& u, const Vector& anchor, double eps) {
  if (u.size() != anchor.size())
    throw DimensionError("shrink_comparator: dimension mismatch");
  if (!(eps > 0.0 && eps <= 1.0))
    throw ValidationError("eps", "must lie in (0, 1]");
  return (1.0 - eps) * u + eps * anchor;
}

Vector simplex_embed(const Vector& full) {
  if (full.size() < 2) throw DimensionError("simplex_embed: need d >= 2");
  return full.head(full.size() - 1);
}

Vector simplex_lift(const Vector& emb) {
  Vector full(emb.size() + 1);
  full.head(emb.size()) = emb;
  full[emb.size()] = 1.0 - emb.sum();
  return full;
}

Regularizer Regularizer::ball_barrier(int d) {
  if (d < 1) throw DimensionError("ball_barrier needs d >= 1");
  return Regularizer(RegularizerKind::BallBarrier, d, 2.0, 4.0, 1.0);
}

Regularizer Regularizer::simplex_entropy(int num_experts) {
  if (num_experts < 2) throw DimensionError("simplex_entropy needs >= 2 experts");
  return Regularizer(RegularizerKind::SimplexEntropy, num_experts - 1, 1.0, 8.0,
                     std::nullopt);
}

bool Regularizer::interior(const Vector& x, double margin) const {
  if (x.size() != dim_) return false;
  if (kind_ == RegularizerKind::BallBarrier) return x.norm() < 1.0 - margin;
  return x.minCoeff() > margin && 1.0 - x.sum() > margin;
}

void Regularizer::check_interior(const Vector& x) const {
  if (x.size() != dim_) throw DimensionError("regularizer: dimension mismatch");
  if (!interior(x, kBoundaryTol))
    throw DomainError("regularizer: point on or outside the domain boundary");
}

Vector Regularizer::domain_center() const {
  if (kind_ == RegularizerKind::BallBarrier) return Vector::Zero(dim_);
  return Vector::Constant(dim_, 1.0 / (dim_ + 1));
}

double Regularizer::value(const Vector& x) const {
  check_interior(x);
  return raw_value(x);
}

Vector Regularizer::grad(const Vector& x) const {
  check_interior(x);
  return raw_grad(x);
}

Matrix Regularizer::hess(const Vector& x) const {
  check_interior(x);
  return raw_hess(x);
}

namespace {

// 1 - |x|^2 and 1 - sum(x) suffer catastrophic cancellation near the
// boundary; extended-precision accumulation keeps the barrier gradient
// accurate enough for the 1e-10 inner-solver tolerance.
double one_minus_squared_norm(const Vector& x) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += static_cast<long double>(x[i]) * static_cast<long double>(x[i]);
  return static_cast<double>(1.0L - s);
}

double one_minus_sum(const Vector& x) {
  long double s = 0.0L;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    s += static_cast<long double>(x[i]);
  return static_cast<double>(1.0L - s);
}

}  // namespace

double Regularizer::raw_value(const Vector& x) const {
  if (kind_ == RegularizerKind::BallBarrier)
    return -std::log(one_minus_squared_norm(x));
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += x[i] * std::log(x[i]);
  double rest = one_minus_sum(x);
  return s + rest * std::log(rest);
}

Vector Regularizer::raw_grad(const Vector& x) const {
  if (kind_ == RegularizerKind::BallBarrier)
    return 2.0 * x / one_minus_squared_norm(x);
  double log_rest = std::log(one_minus_sum(x));
  Vector g(dim_);
  for (int i = 0; i < dim_; ++i) g[i] = std::log(x[i]) - log_rest;
  return g;
}

Matrix Regularizer::raw_hess(const Vector& x) const {
  if (kind_ == RegularizerKind::BallBarrier) {
    double denom = one_minus_squared_norm(x);
    return 2.0 / denom * Matrix::Identity(dim_, dim_) +
           4.0 / (denom * denom) * x * x.transpose();
  }
  double rest = one_minus_sum(x);
  Matrix h = Matrix::Constant(dim_, dim_, 1.0 / rest);
  for (int i = 0; i < dim_; ++i) h(i, i) += 1.0 / x[i];
  return h;
}

double Regularizer::conj_value(const Vector& w) const {
  if (w.size() != dim_) throw DimensionError("regularizer: dimension mismatch");
  if (kind_ == RegularizerKind::BallBarrier) {
    double g = std::sqrt(1.0 + w.squaredNorm());
    return g - std::log1p(g);
  }
  // ln(1 + sum exp(w_i)) computed with a shift covering the implicit 0 term.
  double m = std::max(0.0, w.maxCoeff());
  double s = std::exp(-m);
  for (int i = 0; i < dim_; ++i) s += std::exp(w[i] - m);
  return m + std::log(s);
}

Vector Regularizer::conj_grad(const Vector& w) const {
  if (w.size() != dim_) throw DimensionError("regularizer: dimension mismatch");
  if (kind_ == RegularizerKind::BallBarrier)
    return w / (1.0 + std::sqrt(1.0 + w.squaredNorm()));
  double m = std::max(0.0, w.maxCoeff());
  double s = std::exp(-m);
  Vector e(dim_);
  for (int i = 0; i < dim_; ++i) {
    e[i] = std::exp(w[i] - m);
    s += e[i];
  }
  return e / s;
}

Matrix Regularizer::conj_hess(const Vector& w) const {
  if (w.size() != dim_) throw DimensionError("regularizer: dimension mismatch");
  if (kind_ == RegularizerKind::BallBarrier) {
    double g = std::sqrt(1.0 + w.squaredNorm());
    return Matrix::Identity(dim_, dim_) / (1.0 + g) -
           w * w.transpose() / ((1.0 + g) * (1.0 + g) * g);
  }
  Vector p = conj_grad(w);
  return Matrix(p.asDiagonal()) - p * p.transpose();
}

double bregman(const std::function<double(const Vector&)>& f,
               const std::function<Vector(const Vector&)>& grad_f,
               const Vector& x, const Vector& y) {
  return f(x) - f(y) - grad_f(y).dot(x - y);
}

double bregman(const Regularizer& reg, const Vector& x, const Vector& y) {
  return reg.value(x) - reg.value(y) - reg.grad(y).dot(x - y);
}

CommutatorGap commutator_gap(const Regularizer& reg, const Vector& w,
                             const Vector& w2) {
  auto div = [&](const Vector& a, const Vector& b) {
    return reg.conj_value(a) - reg.conj_value(b) - reg.conj_grad(b).dot(a - b);
  };
  CommutatorGap out;
  out.gap = std::abs(div(w, w2) - div(w2, w));
  out.bound = reg.third_order_m() / 6.0 * std::pow((w - w2).norm(), 3);
  return out;
}

}  // namespace altreg
