// Shared scalar/matrix aliases, error type and seeded RNG used across tomokit.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tomokit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultTol = 1e-10;

// All library failures carry a stable machine-readable name (e.g. "NonHermitian",
// "ZeroMass") next to the human-readable message. The CLI maps names to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

[[noreturn]] inline void fail(const std::string& name, const std::string& message) {
  throw Error(name, message);
}

// Closed real interval, used for randomized parameter ranges. A degenerate
// interval (lo == hi) makes the draw deterministic.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double l, double h) : lo(l), hi(h) {}
  explicit Interval(double v) : lo(v), hi(v) {}

  void require_ordered(const std::string& what) const {
    if (!(lo <= hi)) fail("EmptyRange", what + ": lo > hi (" + std::to_string(lo) + " > " + std::to_string(hi) + ")");
  }
};

struct IntInterval {
  int lo = 0;
  int hi = 0;

  IntInterval() = default;
  IntInterval(int l, int h) : lo(l), hi(h) {}

  void require_ordered(const std::string& what) const {
    if (lo > hi) fail("EmptyRange", what + ": lo > hi");
  }
};

// Deterministic RNG. Distributions are implemented here instead of <random>
// so that identical seeds give identical streams on every platform/stdlib.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // splitmix-style warmup so nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  std::uint64_t next_u64() {
    // xorshift* would do; splitmix64 has no bad seeds at all
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double uniform(const Interval& r) { return uniform(r.lo, r.hi); }

  // uniform integer in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) fail("EmptyRange", "uniform_int(0)");
    // rejection sampling over the smallest covering power of two
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t v;
    do {
      v = next_u64() & mask;
    } while (v >= n);
    return v;
  }

  int uniform_int(const IntInterval& r) {
    return r.lo + static_cast<int>(uniform_int(static_cast<std::uint64_t>(r.hi - r.lo) + 1));
  }

  // standard normal via Box-Muller (pairs cached)
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * kPi * u2);
    have_cached_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  // complex Gaussian with independent N(0,1) real/imag parts
  Complex complex_normal() {
    double re = normal();
    return {re, normal()};
  }

  // Derives an independent substream seed. Used for per-record / per-stage
  // streams so parallel generation stays deterministic.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 0x632BE59BD9B4E019ULL));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(derive(seed, a), b);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace tomokit
