#pragma once

#include <functional>

#include "altreg/common.hpp"
#include "altreg/geometry.hpp"

namespace altreg {

/// Smooth objective handle. hess may be empty where a solver can fall back
/// to gradient steps.
struct Objective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  std::function<Matrix(const Vector&)> hess;
};

struct NewtonOptions {
  double grad_tol = 1e-10;
  int max_iter = 100;
  double armijo = 1e-4;
  double shrink = 0.5;
};

/// Damped Newton for Legendre-barrier objectives: unconstrained steps with
/// backtracking that rejects candidates failing the interior predicate.
/// Returns a point with |grad| <= grad_tol or throws ConvergenceError.
Vector damped_newton(const Objective& obj,
                     const std::function<bool(const Vector&)>& interior,
                     Vector x0, const NewtonOptions& opts = {});

struct MinimizeResult {
  Vector point;
  double value;
};

/// Exact minimizer of <g, x> over the domain. Simplex ties break at the
/// lowest coordinate index.
MinimizeResult minimize_linear(const Vector& g, const Domain& dom);

/// Exact minimizer of x'Ax + b'x + c over a centered ball (interior solve,
/// then a boundary solve on the multiplier when the unconstrained minimum
/// falls outside).
MinimizeResult minimize_quadratic_ball(const Matrix& A, const Vector& b,
                                       double c, const Domain& ball);

/// Projected-Newton descent from the domain center, refined by a boundary
/// grid check at d <= 2. Exact only for the linear/ball-quadratic routes
/// above; here accuracy is solver-grade (residual-driven).
MinimizeResult minimize_convex(const Objective& obj, const Domain& dom);

}  // namespace altreg
