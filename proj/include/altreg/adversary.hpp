#pragma once

#include <cstdint>
#include <vector>

#include "altreg/common.hpp"
#include "altreg/losses.hpp"

namespace altreg {

enum class EnvironmentKind {
  HedgeCycle,     // d=3, one-hot losses cycling e1, e2, e3
  HedgeConstant,  // d=3, constant (1,0,0)
  PMAlternating,  // d=2, (4,0) on even rounds, (-2,0) on odd rounds
  RandomBounded,  // d-dim linear losses, iid uniform in [lo, hi]
  RandomQuadratic // d-dim convex quadratics, seeded
};

/// Deterministic loss-sequence generator; loss(t) is pure in (kind, seed, t).
class Environment {
 public:
  static Environment hedge_cycle();
  static Environment hedge_constant();
  static Environment pm_alternating();
  static Environment random_bounded(int d, std::uint64_t seed, double lo, double hi);
  /// Convex quadratics x'Ax + b'x with A = G'G/d scaled, entries of G and b
  /// uniform in [-scale, scale].
  static Environment random_quadratic(int d, std::uint64_t seed, double scale);

  EnvironmentKind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Loss of round t (1-based).
  LossFn loss(std::int64_t t) const;

  /// HedgeCycle runs in whole cycles and PMAlternating in whole pairs;
  /// anything else passes through unchanged.
  std::int64_t effective_horizon(std::int64_t T) const;
  std::vector<LossFn> sequence(std::int64_t T) const;

 private:
  Environment(EnvironmentKind kind, int d, std::uint64_t seed, double lo,
              double hi, double scale)
      : kind_(kind), dim_(d), seed_(seed), lo_(lo), hi_(hi), scale_(scale) {}
  EnvironmentKind kind_;
  int dim_;
  std::uint64_t seed_ = 0;
  double lo_ = 0.0, hi_ = 0.0, scale_ = 1.0;
};

/// Alternating regret of Hedge against the cycling one-hot environment, in
/// closed form: T (1-e^-eta)^2 / (3 (2+e^-eta)(1+2e^-eta)) for T cycles.
double hedge_cycle_regret_oracle(double eta, std::int64_t t_cycles);

/// Alternating regret of Hedge against the constant (1,0,0) environment:
/// sum_{t=0}^{T} 2 e^{-eta t}/(2+e^{-eta t}) - 1/3 - e^{-eta T}/(2+e^{-eta T}).
double hedge_constant_regret_oracle(double eta, std::int64_t T);

struct OogdIterate {
  bool transition;  // inside the unresolved window around t = 1/eta
  Vector p;         // valid when !transition
};

/// Closed-form OOGD iterate on the alternating (4,0)/(-2,0) sequence.
/// Requires 1/eta to be an even integer; rounds in (1/eta - 3, 1/eta + 6)
/// return a transition marker with no value.
OogdIterate oogd_iterate_oracle(double eta, std::int64_t t);

/// alpha recurrence alpha_{k+1} = alpha_k + 1/(1+alpha_k) from the simulated
/// alpha_5 (> 2 required) down to the requested k >= 5.
double prm_alpha_oracle(double alpha5, std::int64_t k);

/// alpha_5 = R_{11,2}/4 measured by simulating PRM+ for 10 rounds on the
/// alternating sequence.
double prm_alpha5_simulated();

}  // namespace altreg
