#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace altreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Point outside (or too close to the boundary of) the required domain.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

namespace detail {
std::string format_residual(double residual);
}

/// Inner solver failed to reach its tolerance; carries the residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double residual, std::int64_t round = -1)
      : Error(msg + " (residual " + detail::format_residual(residual) +
              (round >= 0 ? ", round " + std::to_string(round) : "") + ")"),
        residual_(residual),
        round_(round) {}
  double residual() const { return residual_; }
  std::int64_t round() const { return round_; }

 private:
  double residual_;
  std::int64_t round_;
};

/// Config / input validation failure; carries the offending field path.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& msg)
      : Error(field + ": " + msg), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// splitmix64 (v1.0): 64-bit counter-based generator with the fixed constants
/// 0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9, 0x94D049BB133111EB. Chosen so loss
/// sequences are bit-reproducible across implementations and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) using the top 53 bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  Vector uniform_vector(int d, double lo, double hi) {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace altreg
