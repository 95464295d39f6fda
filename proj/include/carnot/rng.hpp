#pragma once

#include <cstdint>
#include <cmath>

#include <Eigen/Core>

namespace carnot {

// Counter-based deterministic RNG (splitmix64 core).  Every randomized
// routine in the library takes an explicit seed and derives per-sample
// streams with mix(), so results do not depend on evaluation order or
// thread count.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    // Box-Muller; one value per call keeps the stream layout simple.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::VectorXd unit_vector(int n) {
    Eigen::VectorXd v = gaussian_vector(n);
    double nn = v.norm();
    while (nn < 1e-12) {
      v = gaussian_vector(n);
      nn = v.norm();
    }
    return v / nn;
  }

  // uniform in the Euclidean ball of radius r
  Eigen::VectorXd in_ball(int n, double r) {
    Eigen::VectorXd v = unit_vector(n);
    double u = std::pow(uniform(), 1.0 / n);
    return (r * u) * v;
  }
};

}  // namespace carnot
