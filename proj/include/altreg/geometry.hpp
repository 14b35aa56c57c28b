#pragma once

#include <functional>
#include <optional>

#include "altreg/common.hpp"

namespace altreg {

enum class DomainKind { Simplex, Ball, Interval, Box };

/// Convex decision set. Simplex points are full probability vectors
/// (nonnegative, summing to 1); Ball is the Euclidean ball of the given
/// radius; Interval is the 1-d segment [lo, hi]; Box is [lo, hi]^d.
class Domain {
 public:
  static Domain simplex(int d);
  static Domain ball(int d, double radius = 1.0);
  static Domain interval(double lo, double hi);
  static Domain box(int d, double lo, double hi);

  DomainKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  double radius() const { return radius_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  bool contains(const Vector& x, double tol = 1e-12) const;
  /// Strict interiority with the given boundary margin.
  bool interior(const Vector& x, double margin = 0.0) const;
  /// Euclidean projection onto the set.
  Vector project(const Vector& v) const;
  /// Max pairwise Euclidean distance: 2r for the ball, sqrt(2) for the
  /// simplex in the probability representation, hi-lo for an interval.
  double diameter() const;
  Vector center() const;
  /// Uniform-ish sample used by certifiers and tests; deterministic in rng.
  Vector sample(SplitMix64& rng) const;

 private:
  Domain(DomainKind kind, int dim, double radius, double lo, double hi)
      : kind_(kind), dim_(dim), radius_(radius), lo_(lo), hi_(hi) {}
  DomainKind kind_;
  int dim_;
  double radius_;
  double lo_, hi_;
};

/// Euclidean projection onto the probability simplex of matching dimension.
Vector project_simplex(const Vector& v);

/// KL divergence sum_i p_i ln(p_i/q_i) with 0 ln 0 = 0; returns +inf when
/// some p_i > 0 has q_i = 0. Inputs must be simplex points.
double kl(const Vector& p, const Vector& q);

/// Convex combination (1-eps) u + eps anchor; eps in (0, 1].
Vector shrink_comparator(const Vector& u, const Vector& anchor, double eps);

/// Drop the last coordinate of a full simplex point.
Vector simplex_embed(const Vector& full);
/// Append 1 - sum to an embedded point.
Vector simplex_lift(const Vector& emb);

enum class RegularizerKind { BallBarrier, SimplexEntropy };

/// Legendre regularizer with a closed-form conjugate.
///
/// BallBarrier on the unit ball: psi(x) = -ln(1 - |x|^2), sigma = 2, M = 4,
/// barrier parameter nu = 1.
/// SimplexEntropy over d experts, in the (d-1)-dimensional embedding with the
/// last coordinate implicit: psi(x) = sum x_i ln x_i + (1-sum) ln(1-sum),
/// sigma = 1, M = 8.
///
/// value/grad/hess require interior points: anything within 1e-10 of the
/// boundary is treated as a boundary point and rejected, since the log terms
/// blow up there. Conjugate functions accept any dual vector.
class Regularizer {
 public:
  static Regularizer ball_barrier(int d);
  static Regularizer simplex_entropy(int num_experts);

  RegularizerKind kind() const { return kind_; }
  /// Dimension of the coordinate space (d for the ball, d-1 for the
  /// entropy over d experts).
  int dim() const { return dim_; }
  double sigma() const { return sigma_; }
  /// Third-order smoothness constant of the conjugate.
  double third_order_m() const { return m_; }
  std::optional<double> barrier_nu() const { return nu_; }

  double value(const Vector& x) const;
  Vector grad(const Vector& x) const;
  Matrix hess(const Vector& x) const;
  /// Ungated variants for inner solvers whose iterates are interior by
  /// construction (no 1e-10 boundary-tolerance check).
  double raw_value(const Vector& x) const;
  Vector raw_grad(const Vector& x) const;
  Matrix raw_hess(const Vector& x) const;
  double conj_value(const Vector& w) const;
  Vector conj_grad(const Vector& w) const;
  Matrix conj_hess(const Vector& w) const;

  /// Strict interiority of a coordinate-space point with the given margin.
  bool interior(const Vector& x, double margin = 0.0) const;
  /// argmin of psi (the ball center / uniform distribution).
  Vector domain_center() const;

  static constexpr double kBoundaryTol = 1e-10;

 private:
  Regularizer(RegularizerKind kind, int dim, double sigma, double m,
              std::optional<double> nu)
      : kind_(kind), dim_(dim), sigma_(sigma), m_(m), nu_(nu) {}
  void check_interior(const Vector& x) const;

  RegularizerKind kind_;
  int dim_;
  double sigma_;
  double m_;
  std::optional<double> nu_;
};

/// D_f(x,y) = f(x) - f(y) - <grad f(y), x - y>.
double bregman(const std::function<double(const Vector&)>& f,
               const std::function<Vector(const Vector&)>& grad_f,
               const Vector& x, const Vector& y);
double bregman(const Regularizer& reg, const Vector& x, const Vector& y);

struct CommutatorGap {
  double gap;    // |D_{psi*}(w,w2) - D_{psi*}(w2,w)|
  double bound;  // (M/6) |w - w2|^3
};

CommutatorGap commutator_gap(const Regularizer& reg, const Vector& w,
                             const Vector& w2);

}  // namespace altreg
