#pragma once

// Seeded generators for property tests.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "relframe/minkowski.hpp"

namespace relframe::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Vec4 vector(double scale = 1.0) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale),
            uniform(-scale, scale)};
  }

  Vec4 spatial(double scale = 1.0) {
    return {0.0, uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
  }

  // Future-pointing unit timelike vector with speed below max_speed.
  Vec4 four_velocity(double max_speed = 0.9) {
    Vec4 dir = spatial();
    while (dir.norm() < 1e-3) dir = spatial();
    dir /= dir.norm();
    const double v = uniform(0.0, max_speed);
    const double g = 1.0 / std::sqrt(1.0 - v * v);
    return {g, g * v * dir[1], g * v * dir[2], g * v * dir[3]};
  }

  // g-antisymmetric: a rotation part plus a boost part.
  LinMap4 generator(double scale = 1.0) {
    return scale * (wedge(vector(), vector()) + wedge(vector(), vector()));
  }

  // Orthonormal triad of E_u, right-handed, in a random orientation.
  std::array<Vec4, 3> triad(const Vec4& u) {
    const LinMap4 rot = exp_generator(rest_space_rotation_generator(u, spatial(2.0)), 1.0);
    const auto b = rest_space_basis(u);
    return {rot * b[0], rot * b[1], rot * b[2]};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double isometry_residual(const LinMap4& m) {
  return (adjoint(m) * m - identity4()).norm() / std::max(1.0, m.squaredNorm());
}

}  // namespace relframe::testing
