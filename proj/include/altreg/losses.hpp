#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "altreg/common.hpp"
#include "altreg/geometry.hpp"

namespace altreg {

enum class LossKind { Linear, Quadratic, BlackBox };

/// Certified constants: Lipschitz L, smoothness beta, self-concordance C.
struct Certified {
  double L = 0.0;
  double beta = 0.0;
  double C = 0.0;
};

/// Convex loss with value, gradient and certified constants.
///
/// Linear: f(x) = <ell, x>. Quadratic: f(x) = x'Ax + b'x + c, stored with A
/// symmetrized and required convex (lambda_min >= -1e-9). BlackBox wraps
/// user callables and carries user-supplied constants on trust.
class LossFn {
 public:
  static LossFn linear(Vector ell);
  static LossFn quadratic(Matrix A, Vector b, double c);
  static LossFn black_box(std::function<double(const Vector&)> value,
                          std::function<Vector(const Vector&)> grad, int dim,
                          std::optional<Certified> certified = std::nullopt);

  LossKind kind() const { return kind_; }
  int dim() const { return dim_; }

  double eval(const Vector& x) const;
  Vector grad(const Vector& x) const;
  /// Exact for linear/quadratic; central differences of grad for black-box.
  Matrix hess(const Vector& x) const;

  const Vector& ell() const;            // Linear only
  const Matrix& quad_matrix() const;    // Quadratic only (symmetrized)
  const Vector& quad_linear() const;    // Quadratic only
  double quad_constant() const;         // Quadratic only

  std::optional<Certified> certified() const { return certified_; }

  /// Safe upper bounds (L, beta, C) over the domain; closed-form for
  /// linear/quadratic, error for black-box without user constants.
  Certified certify(const Domain& dom) const;

  /// Samples the domain and checks max |f| <= bound.
  bool bounded_by(const Domain& dom, double bound, int samples,
                  std::uint64_t seed) const;

 private:
  LossFn() = default;
  LossKind kind_ = LossKind::Linear;
  int dim_ = 0;
  Vector ell_;
  Matrix A_;
  Vector b_;
  double c_ = 0.0;
  std::function<double(const Vector&)> value_fn_;
  std::function<Vector(const Vector&)> grad_fn_;
  std::optional<Certified> certified_;
};

/// Serialize a loss sequence to a JSON array of {kind, params} records so
/// adversarial sequences are replayable bit-exactly. Black-box losses are
/// not serializable.
std::string losses_to_json(const std::vector<LossFn>& losses);
std::vector<LossFn> losses_from_json(const std::string& text);

}  // namespace altreg
