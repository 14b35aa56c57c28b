#include "altreg/adversary.hpp"

#include <cmath>

#include "altreg/learners.hpp"

namespace altreg {

Environment Environment::hedge_cycle() {
  return Environment(EnvironmentKind::HedgeCycle, 3, 0, 0, 0, 1);
}

Environment Environment::hedge_constant() {
  return Environment(EnvironmentKind::HedgeConstant, 3, 0, 0, 0, 1);
}

Environment Environment::pm_alternating() {
  return Environment(EnvironmentKind::PMAlternating, 2, 0, 0, 0, 1);
}

Environment Environment::random_bounded(int d, std::uint64_t seed, double lo,
                                        double hi) {
  if (d < 1) throw DimensionError("random_bounded: d >= 1 required");
  if (!(lo < hi)) throw ValidationError("range", "needs lo < hi");
  return Environment(EnvironmentKind::RandomBounded, d, seed, lo, hi, 1);
}

Environment Environment::random_quadratic(int d, std::uint64_t seed, double scale) {
  if (d < 1) throw DimensionError("random_quadratic: d >= 1 required");
  if (!(scale > 0)) throw ValidationError("scale", "must be positive");
  return Environment(EnvironmentKind::RandomQuadratic, d, seed, 0, 0, scale);
}

LossFn Environment::loss(std::int64_t t) const {
  if (t < 1) throw ValidationError("t", "rounds are 1-based");
  switch (kind_) {
    case EnvironmentKind::HedgeCycle: {
      Vector e = Vector::Zero(3);
      e[static_cast<int>((t - 1) % 3)] = 1.0;
      return LossFn::linear(e);
    }
    case EnvironmentKind::HedgeConstant: {
      Vector e = Vector::Zero(3);
      e[0] = 1.0;
      return LossFn::linear(e);
    }
    case EnvironmentKind::PMAlternating: {
      Vector e(2);
      e << (t % 2 == 0 ? 4.0 : -2.0), 0.0;
      return LossFn::linear(e);
    }
    case EnvironmentKind::RandomBounded: {
      SplitMix64 rng(seed_ + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t));
      return LossFn::linear(rng.uniform_vector(dim_, lo_, hi_));
    }
    case EnvironmentKind::RandomQuadratic: {
      SplitMix64 rng(seed_ + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t));
      Matrix G(dim_, dim_);
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) G(i, j) = rng.uniform(-scale_, scale_);
      Matrix A = G.transpose() * G / dim_;
      Vector b = rng.uniform_vector(dim_, -scale_, scale_);
      return LossFn::quadratic(A, b, 0.0);
    }
  }
  throw Error("environment: unknown kind");
}

std::int64_t Environment::effective_horizon(std::int64_t T) const {
  if (kind_ == EnvironmentKind::HedgeCycle) return 3 * (T / 3);
  if (kind_ == EnvironmentKind::PMAlternating) return 2 * (T / 2);
  return T;
}

std::vector<LossFn> Environment::sequence(std::int64_t T) const {
  const std::int64_t n = effective_horizon(T);
  std::vector<LossFn> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t t = 1; t <= n; ++t) out.push_back(loss(t));
  return out;
}

double hedge_cycle_regret_oracle(double eta, std::int64_t t_cycles) {
  if (!(eta > 0)) throw ValidationError("eta", "must be positive");
  const double e = std::exp(-eta);
  return t_cycles * (1.0 - e) * (1.0 - e) / (3.0 * (2.0 + e) * (1.0 + 2.0 * e));
}

double hedge_constant_regret_oracle(double eta, std::int64_t T) {
  if (!(eta > 0)) throw ValidationError("eta", "must be positive");
  double sum = 0.0;
  for (std::int64_t t = 0; t <= T; ++t) {
    const double e = std::exp(-eta * static_cast<double>(t));
    sum += 2.0 * e / (2.0 + e);
  }
  const double eT = std::exp(-eta * static_cast<double>(T));
  return sum - 1.0 / 3.0 - eT / (2.0 + eT);
}

OogdIterate oogd_iterate_oracle(double eta, std::int64_t t) {
  if (!(eta > 0)) throw ValidationError("eta", "must be positive");
  const double inv = 1.0 / eta;
  const auto n = static_cast<std::int64_t>(std::llround(inv));
  if (std::abs(inv - static_cast<double>(n)) > 1e-9 || n % 2 != 0)
    throw ValidationError("eta", "1/eta must be an even integer");
  if (t < 1) throw ValidationError("t", "rounds are 1-based");

  Vector p(2);
  if (t <= n - 3) {
    if (t == 1) {
      p << 0.5, 0.5;
    } else if (t % 2 == 0) {
      const double k = static_cast<double>(t / 2);
      p << 0.5 - k * eta + 3.0 * eta, 0.5 + k * eta - 3.0 * eta;
    } else {
      const double k = static_cast<double>((t - 1) / 2);
      p << 0.5 - k * eta - 2.0 * eta, 0.5 + k * eta + 2.0 * eta;
    }
    return {false, p};
  }
  if (t >= n + 6) {
    if (t % 2 == 0)
      p << 2.0 * eta, 1.0 - 2.0 * eta;
    else
      p << 0.0, 1.0;
    return {false, p};
  }
  return {true, Vector()};
}

double prm_alpha_oracle(double alpha5, std::int64_t k) {
  if (k < 5) throw ValidationError("k", "recurrence starts at k = 5");
  if (!(alpha5 > 2.0))
    throw ValidationError("alpha5", "inconsistent base value: must exceed 2");
  double a = alpha5;
  for (std::int64_t j = 5; j < k; ++j) a += 1.0 / (1.0 + a);
  return a;
}

double prm_alpha5_simulated() {
  PrmPlus learner(2);
  Environment env = Environment::pm_alternating();
  for (std::int64_t t = 1; t <= 10; ++t) {
    learner.act();
    learner.observe(env.loss(t));
  }
  // After 10 observations the stored clipped vector is R_11; alpha_5 is a
  // quarter of its second entry.
  return learner.regret_state()[1] / 4.0;
}

}  // namespace altreg
