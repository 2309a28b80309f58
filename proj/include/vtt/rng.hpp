#ifndef VTT_RNG_HPP
#define VTT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace vtt {

// splitmix64 finalizer; spreads low-entropy inputs over the full 64-bit range.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed from a base seed plus up to two salts
// (e.g. strategy index and repeat index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt_a,
                                 std::uint64_t salt_b = 0) {
  return mix64(mix64(base ^ 0xa0761d6478bd642fULL) ^ mix64(salt_a) ^
               mix64(mix64(salt_b) ^ 0xe7037ed1a0b428dbULL));
}

// mt19937_64 with hand-rolled draw helpers. The std:: distributions are
// implementation-defined, which would make session logs differ between
// standard libraries; every draw here depends only on the engine's output
// stream, so a fixed seed gives the same sequence everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform over {0, ..., n-1}; rejection keeps the draw unbiased.
  std::size_t index(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; the spare value is cached so draws come in a fixed order.
  double standard_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = standard_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double alpha, double beta_param) {
    const double a = gamma(alpha);
    const double b = gamma(beta_param);
    return a / (a + b);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace vtt

#endif  // VTT_RNG_HPP
