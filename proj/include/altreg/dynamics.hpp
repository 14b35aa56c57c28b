#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "altreg/common.hpp"
#include "altreg/learners.hpp"
#include "altreg/regret.hpp"

namespace altreg {

enum class GameKind { Matrix, ConvexQuadratic };

/// Quadratic payoff over the stacked vector (x, y).
struct QuadraticPayoff {
  Matrix Q;
  Vector q;
  double c = 0.0;
};

/// Two-player game with losses u1 (x-player) and u2 (y-player), values in
/// [-1, 1]. Out-of-range payoffs are rescaled on construction and the factor
/// recorded; certificates are scale-covariant.
class Game {
 public:
  /// Bilinear x'Ay loss for the x-player; u2 = -u1.
  static Game matrix_zero_sum(Matrix u1);
  static Game matrix_general(Matrix u1, Matrix u2);
  /// u1 convex in x for each y, u2 convex in y for each x (eigenvalue-checked).
  static Game convex_quadratic(QuadraticPayoff u1, QuadraticPayoff u2, Domain x_dom,
                               Domain y_dom);

  GameKind kind() const { return kind_; }
  bool zero_sum() const { return zero_sum_; }
  double rescale_factor() const { return rescale_; }
  const Domain& x_domain() const { return x_dom_; }
  const Domain& y_domain() const { return y_dom_; }

  double u1(const Vector& x, const Vector& y) const;
  double u2(const Vector& x, const Vector& y) const;
  /// Round losses: u1(., y) for the x-player, u2(x, .) for the y-player.
  LossFn loss_for_x(const Vector& y) const;
  LossFn loss_for_y(const Vector& x) const;

  /// Smallest unilateral-deviation certificate value for fixed strategies:
  /// max over players of the gain from the best fixed deviation. Exact for
  /// matrix games (vertex enumeration); solver + boundary grid at d <= 2 for
  /// quadratic games. Zero-sum games only.
  double best_response_value_x(const Vector& y) const;  // min_x u1(x, y)
  double best_response_value_y(const Vector& x) const;  // min_y u2(x, y)

  static Game from_json(const std::string& text);
  std::string to_json() const;

 private:
  Game(GameKind kind, Domain x_dom, Domain y_dom)
      : kind_(kind), x_dom_(std::move(x_dom)), y_dom_(std::move(y_dom)) {}
  void validate_and_rescale();

  GameKind kind_;
  Domain x_dom_;
  Domain y_dom_;
  bool zero_sum_ = false;
  double rescale_ = 1.0;
  Matrix A_;  // matrix game: u1 = x'Ay
  Matrix B_;  //              u2 = x'By
  QuadraticPayoff qu1_, qu2_;
};

/// Full record of an alternating run: x_1..x_{T+1}, y_0..y_T and per-player
/// regret ledgers (the y-player's round-s loss u2(x_s, .) is charged at
/// y_{s-1} standard / y_s cheating).
struct DynamicTrace {
  std::vector<Vector> x;
  std::vector<Vector> y;
  RegretLedger ledger_x;
  RegretLedger ledger_y;
  std::int64_t horizon = 0;

  Vector x_average() const;  // mean of x_1..x_T
  Vector y_average() const;  // mean of y_1..y_T
};

/// Alternating play: each round the x-player acts first, the y-player
/// observes u2(x_t, .) and then acts, the x-player observes u1(., y_t).
/// y_0 is the y-player's output on an empty history.
DynamicTrace run_alternating(const Game& game, Learner& alg_x, Learner& alg_y,
                             std::int64_t T);

/// Max unilateral deviation gain at (x_bar, y_bar); zero-sum games only.
double ne_gap(const Game& game, const Vector& x_bar, const Vector& y_bar);

/// Deviation gain of the empirical distribution putting equal weight on
/// (x_t, y_t) and (x_{t+1}, y_t) for t in [T], clamped at zero.
double cce_gap(const Game& game, const DynamicTrace& trace);

}  // namespace altreg
