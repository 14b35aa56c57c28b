#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "altreg/common.hpp"
#include "altreg/geometry.hpp"
#include "altreg/losses.hpp"

namespace altreg {

/// Stateful online algorithm: act() yields the current decision, observe()
/// feeds the round's loss. act() is idempotent between observes.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual const Vector& act() = 0;
  virtual void observe(const LossFn& f) = 0;
  virtual const Domain& domain() const = 0;
  /// Number of losses observed so far.
  virtual std::int64_t observed() const = 0;
};

/// Hedge over the simplex: p_t proportional to exp(-eta * cumulative loss),
/// computed with max-subtraction. The cumulative vector is recentered
/// (shifted by its minimum) every 10^4 rounds; softmax is shift-invariant so
/// decisions are unaffected.
class Hedge final : public Learner {
 public:
  Hedge(int d, double eta);

  const Vector& act() override;
  void observe(const LossFn& f) override;
  const Domain& domain() const override { return dom_; }
  std::int64_t observed() const override { return observed_; }

  double eta() const { return eta_; }
  const Vector& cumulative_loss() const { return cum_loss_; }

 private:
  Domain dom_;
  double eta_;
  Vector cum_loss_;
  Vector decision_;
  bool fresh_ = false;
  std::int64_t observed_ = 0;
};

/// Follow-the-Regularized-Leader: x_t = argmin losses-so-far + psi/eta,
/// solved by damped Newton (backtracking line search, interior-feasibility
/// rejection, |grad| <= 1e-10), warm-started at the previous iterate.
///
/// Linear and quadratic losses aggregate into a single quadratic so the
/// per-round cost is independent of t; black-box losses are stored and
/// re-evaluated (O(t) per step).
///
/// For the simplex domain the solve runs in the (d-1)-dimensional embedding
/// with the last coordinate implicit; act() returns full simplex points.
class Ftrl final : public Learner {
 public:
  Ftrl(Domain dom, Regularizer reg, double eta);

  const Vector& act() override;
  void observe(const LossFn& f) override;
  const Domain& domain() const override { return dom_; }
  std::int64_t observed() const override { return static_cast<std::int64_t>(observed_); }

  double eta() const { return eta_; }
  const Regularizer& regularizer() const { return reg_; }

  /// Coordinate-space representation of a decision (identity for the ball,
  /// embedding for the simplex), and back.
  Vector to_coordinates(const Vector& x) const;
  Vector from_coordinates(const Vector& z) const;

  /// Value/gradient of the current objective (losses observed so far plus
  /// psi/eta) in coordinate space. Snapshot: captures the aggregate by value,
  /// so it stays pinned to the round it was taken at.
  std::function<double(const Vector&)> objective_value_fn() const;
  std::function<Vector(const Vector&)> objective_grad_fn() const;

 private:
  double loss_value(const Vector& x_full) const;
  Vector loss_grad(const Vector& x_full) const;
  Matrix loss_hess(const Vector& x_full) const;
  void solve();

  Domain dom_;
  Regularizer reg_;
  double eta_;
  Matrix quad_sum_;
  Vector lin_sum_;
  double const_sum_ = 0.0;
  std::vector<LossFn> black_box_;
  std::int64_t observed_ = 0;
  Vector iterate_;   // coordinate space
  Vector decision_;  // full space
  bool fresh_ = false;
};

/// Gibbs-mean learner over a low-dimensional body: the decision is the mean
/// of p_t(x) proportional to exp(-eta * cumulative loss at x), computed by
/// deterministic quadrature (d = 1: composite Gauss-Legendre with 2048
/// nodes; d = 2: 512x512 tensor grid over the bounding box with a membership
/// indicator and a doubling convergence check at 1e-7).
class ContinuousHedge final : public Learner {
 public:
  ContinuousHedge(Domain dom, double eta);

  const Vector& act() override;
  void observe(const LossFn& f) override;
  const Domain& domain() const override { return dom_; }
  std::int64_t observed() const override { return observed_; }

  double eta() const { return eta_; }

 private:
  double loss_value(const Vector& x) const;
  Vector gibbs_mean(int nodes_per_axis) const;

  Domain dom_;
  double eta_;
  Matrix quad_sum_;
  Vector lin_sum_;
  double const_sum_ = 0.0;
  std::vector<LossFn> black_box_;
  std::int64_t observed_ = 0;
  Vector decision_;
  bool fresh_ = false;
};

/// Optimistic online gradient descent on the simplex with the previous loss
/// as the prediction: p_t projects p_hat - eta*m_t, then p_hat steps on the
/// realized loss and m picks it up.
class Oogd final : public Learner {
 public:
  Oogd(int d, double eta);

  const Vector& act() override;
  void observe(const LossFn& f) override;
  const Domain& domain() const override { return dom_; }
  std::int64_t observed() const override { return observed_; }

  double eta() const { return eta_; }
  const Vector& secondary_iterate() const { return p_hat_; }
  const Vector& prediction() const { return m_; }

 private:
  Domain dom_;
  double eta_;
  Vector p_hat_;
  Vector m_;
  Vector decision_;
  bool fresh_ = false;
  std::int64_t observed_ = 0;
};

/// Predictive regret matching+: plays the normalized clipped regret vector
/// advanced by the last instantaneous regret. Zero state plays uniform.
class PrmPlus final : public Learner {
 public:
  explicit PrmPlus(int d);

  const Vector& act() override;
  void observe(const LossFn& f) override;
  const Domain& domain() const override { return dom_; }
  std::int64_t observed() const override { return observed_; }

  const Vector& regret_state() const { return R_; }            // R_{t+1}
  const Vector& last_instant_regret() const { return r_prev_; }  // r_t
  const Vector& predicted_state() const { return R_hat_; }     // R-hat of last act

 private:
  Domain dom_;
  Vector R_;
  Vector r_prev_;
  Vector R_hat_;
  Vector decision_;
  bool fresh_ = false;
  std::int64_t observed_ = 0;
};

/// Plays a fixed point; observe is a no-op.
class ConstantLearner final : public Learner {
 public:
  ConstantLearner(Domain dom, Vector point);

  const Vector& act() override { return point_; }
  void observe(const LossFn&) override { ++observed_; }
  const Domain& domain() const override { return dom_; }
  std::int64_t observed() const override { return observed_; }

 private:
  Domain dom_;
  Vector point_;
  std::int64_t observed_ = 0;
};

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace altreg
