#include "altreg/solvers.hpp"
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace altreg {

namespace detail {
std::string format_residual(double residual) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", residual);
  return buf;
}
}  // namespace detail

Vector damped_newton(const Objective& obj,
                     const std::function<bool(const Vector&)>& interior,
                     Vector x0, const NewtonOptions& opts) {
  if (!interior(x0)) throw DomainError("damped_newton: start not interior");
  Vector x = std::move(x0);
  double fx = obj.value(x);
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    Vector g = obj.grad(x);
    residual = g.norm();
    if (residual <= opts.grad_tol) return x;
    Matrix H = obj.hess(x);
    Vector step = H.ldlt().solve(-g);
    if (!step.allFinite()) {
      // Singular Hessian; fall back to a gradient step.
      step = -g;
    }
    double slope = g.dot(step);
    if (slope > 0) step = -g, slope = g.dot(step);
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 70; ++bt) {
      Vector cand = x + alpha * step;
      if (interior(cand)) {
        double fc = obj.value(cand);
        // Near the optimum the Armijo decrease falls below representable
        // differences of F, so a step that contracts the gradient norm is
        // also accepted; the residual stays measurable long after value
        // comparisons drown in cancellation noise.
        const double guard = 1e-14 * (std::abs(fx) + std::abs(fc)) + 1e-300;
        bool accept = std::isfinite(fc) &&
                      fc <= fx + opts.armijo * alpha * slope + guard;
        if (!accept && std::isfinite(fc))
          accept = obj.grad(cand).norm() <= 0.9 * residual;
        if (accept) {
          x = std::move(cand);
          fx = fc;
          moved = true;
          break;
        }
      }
      alpha *= opts.shrink;
    }
    if (!moved) break;  // line search stalled; residual check below decides
  }
  Vector g = obj.grad(x);
  if (g.norm() <= opts.grad_tol) return x;
  throw ConvergenceError("damped_newton failed to reach tolerance", g.norm());
}

MinimizeResult minimize_linear(const Vector& g, const Domain& dom) {
  if (g.size() != dom.dimension())
    throw DimensionError("minimize_linear: dimension mismatch");
  const int d = dom.dimension();
  switch (dom.kind()) {
    case DomainKind::Simplex: {
      int best = 0;
      for (int i = 1; i < d; ++i)
        if (g[i] < g[best]) best = i;  // strict: ties keep the lowest index
      Vector u = Vector::Zero(d);
      u[best] = 1.0;
      return {u, g[best]};
    }
    case DomainKind::Ball: {
      double n = g.norm();
      if (n == 0.0) return {Vector::Zero(d), 0.0};
      Vector u = -dom.radius() / n * g;
      return {u, -dom.radius() * n};
    }
    case DomainKind::Interval:
    case DomainKind::Box: {
      Vector u(d);
      double val = 0.0;
      for (int i = 0; i < d; ++i) {
        u[i] = g[i] > 0.0 ? dom.lo() : dom.hi();
        val += g[i] * u[i];
      }
      return {u, val};
    }
  }
  throw Error("minimize_linear: unsupported domain");
}

MinimizeResult minimize_quadratic_ball(const Matrix& A, const Vector& b,
                                       double c, const Domain& ball) {
  if (ball.kind() != DomainKind::Ball)
    throw ValidationError("domain", "minimize_quadratic_ball needs a ball");
  const int d = ball.dimension();
  const double r = ball.radius();
  auto value = [&](const Vector& x) { return x.dot(A * x) + b.dot(x) + c; };
  auto solve_at = [&](double lam) {
    Matrix M = 2.0 * A + 2.0 * lam * Matrix::Identity(d, d);
    return Vector(M.ldlt().solve(-b));
  };
  // Interior stationary point first.
  Vector x = solve_at(1e-14);
  if (x.allFinite() && x.norm() <= r) return {x, value(x)};
  // Boundary: |x(lam)| decreases in lam; bisect to |x| = r.
  double lo = 0.0, hi = std::max(1.0, b.norm() / (2.0 * r));
  while (solve_at(hi).norm() > r) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (solve_at(mid).norm() > r)
      lo = mid;
    else
      hi = mid;
  }
  x = solve_at(hi);
  if (x.norm() > 0) x *= r / x.norm();
  return {x, value(x)};
}

namespace {

// Boundary candidates for the d <= 2 grid refinement.
std::vector<Vector> boundary_grid(const Domain& dom) {
  std::vector<Vector> pts;
  const int per_axis = 101;
  switch (dom.kind()) {
    case DomainKind::Interval: {
      Vector a(1), b(1);
      a[0] = dom.lo();
      b[0] = dom.hi();
      pts = {a, b};
      break;
    }
    case DomainKind::Ball: {
      if (dom.dimension() == 1) {
        Vector a(1), b(1);
        a[0] = -dom.radius();
        b[0] = dom.radius();
        pts = {a, b};
      } else if (dom.dimension() == 2) {
        const int n = 4 * per_axis;
        for (int i = 0; i < n; ++i) {
          double th = 2.0 * M_PI * i / n;
          Vector p(2);
          p << dom.radius() * std::cos(th), dom.radius() * std::sin(th);
          pts.push_back(p);
        }
      }
      break;
    }
    case DomainKind::Box: {
      if (dom.dimension() == 1) {
        Vector a(1), b(1);
        a[0] = dom.lo();
        b[0] = dom.hi();
        pts = {a, b};
      } else if (dom.dimension() == 2) {
        for (int i = 0; i < per_axis; ++i) {
          double s = dom.lo() + (dom.hi() - dom.lo()) * i / (per_axis - 1);
          Vector p(2);
          p << s, dom.lo();
          pts.push_back(p);
          p << s, dom.hi();
          pts.push_back(p);
          p << dom.lo(), s;
          pts.push_back(p);
          p << dom.hi(), s;
          pts.push_back(p);
        }
      }
      break;
    }
    case DomainKind::Simplex: {
      const int d = dom.dimension();
      if (d == 2) {
        Vector a(2), b(2);
        a << 1, 0;
        b << 0, 1;
        pts = {a, b};
      } else if (d == 3) {
        for (int e = 0; e < 3; ++e) {
          int i = e, j = (e + 1) % 3;
          for (int k = 0; k < per_axis; ++k) {
            double s = static_cast<double>(k) / (per_axis - 1);
            Vector p = Vector::Zero(3);
            p[i] = s;
            p[j] = 1.0 - s;
            pts.push_back(p);
          }
        }
      }
      break;
    }
  }
  return pts;
}

Vector projected_descent(const Objective& obj, const Domain& dom, Vector x,
                         int max_iter) {
  double fx = obj.value(x);
  for (int it = 0; it < max_iter; ++it) {
    Vector g = obj.grad(x);
    Vector step;
    if (obj.hess) {
      Matrix H = obj.hess(x);
      H.diagonal().array() += 1e-12;
      step = H.ldlt().solve(-g);
      if (!step.allFinite() || g.dot(step) > 0) step = -g;
    } else {
      step = -g;
    }
    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector cand = dom.project(x + alpha * step);
      double fc = obj.value(cand);
      if (fc <= fx + 1e-4 * g.dot(cand - x)) {
        moved = (cand - x).norm() > 0;
        x = std::move(cand);
        fx = fc;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
    // Projected-gradient residual as the stationarity measure.
    if ((x - dom.project(x - obj.grad(x))).norm() <= 1e-13 * (1.0 + x.norm()))
      break;
  }
  return x;
}

}  // namespace

MinimizeResult minimize_convex(const Objective& obj, const Domain& dom) {
  Vector x = projected_descent(obj, dom, dom.center(), 400);
  double fx = obj.value(x);
  if (dom.dimension() <= 2 || dom.kind() == DomainKind::Simplex) {
    for (const Vector& p : boundary_grid(dom)) {
      double fp = obj.value(p);
      if (fp < fx) {
        Vector polished = projected_descent(obj, dom, p, 100);
        double fpol = obj.value(polished);
        if (fpol < fx) {
          x = polished;
          fx = fpol;
        }
        if (fp < fx) {
          x = p;
          fx = fp;
        }
      }
    }
  }
  return {x, fx};
}

}  // namespace altreg
