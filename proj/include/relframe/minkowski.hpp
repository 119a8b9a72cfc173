#pragma once

// Minkowski-space linear algebra in one fixed inertial chart, signature
// (-,+,+,+), c = 1. Every map is stored as a 4x4 component matrix acting on
// column vectors (t, x, y, z); basis independence lives in the contracts
// (metric adjoints, projectors), not in the storage.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "relframe/error.hpp"

namespace relframe {

using Vec4 = Eigen::Vector4d;
using LinMap4 = Eigen::Matrix4d;

inline constexpr double kUnitTolerance = 1e-12;

inline LinMap4 identity4() { return LinMap4::Identity(); }

inline Vec4 lower(const Vec4& v) { return {-v[0], v[1], v[2], v[3]}; }

inline double dot(const Vec4& v, const Vec4& w) {
  return -v[0] * w[0] + v[1] * w[1] + v[2] * w[2] + v[3] * w[3];
}

// sqrt(|v.v|): proper length for spacelike v, proper time for timelike v.
inline double magnitude(const Vec4& v) { return std::sqrt(std::abs(dot(v, v))); }

// (a (x) b) w = a * dot(b, w)
inline LinMap4 outer(const Vec4& a, const Vec4& b) {
  return a * lower(b).transpose();
}

// A* with dot(A x, y) = dot(x, A* y).
inline LinMap4 adjoint(const LinMap4& a) {
  LinMap4 r = a.transpose();
  r.row(0) *= -1.0;
  r.col(0) *= -1.0;
  return r;
}

inline LinMap4 symmetric_part(const LinMap4& a) { return 0.5 * (a + adjoint(a)); }
inline LinMap4 antisymmetric_part(const LinMap4& a) { return 0.5 * (a - adjoint(a)); }

// Component (Frobenius) norm in the fixed chart.
inline double map_norm(const LinMap4& a) { return a.norm(); }

inline bool is_four_velocity(const Vec4& u, double tol = kUnitTolerance) {
  const double scale = std::max(1.0, u[0] * u[0]);
  return u[0] > 0.0 && std::abs(dot(u, u) + 1.0) <= tol * scale;
}

inline void require_four_velocity(const Vec4& u, const char* what,
                                  double tol = kUnitTolerance) {
  if (!is_four_velocity(u, tol)) {
    throw PreconditionError(std::string(what) +
                            " is not a future-pointing unit timelike vector");
  }
}

// Orthogonal projection onto the rest space E_u: 1 + u (x) u.
inline LinMap4 projector(const Vec4& u) {
  require_four_velocity(u, "projector: u");
  return identity4() + outer(u, u);
}

// (x ^ y) z = x dot(y, z) - y dot(x, z)
inline LinMap4 wedge(const Vec4& x, const Vec4& y) { return outer(x, y) - outer(y, x); }

// The boost in span{u, u2} carrying u to u2, identity on the orthogonal
// complement of that plane.
inline LinMap4 boost(const Vec4& u, const Vec4& u2) {
  require_four_velocity(u, "boost: u", 1e-10);
  require_four_velocity(u2, "boost: u2", 1e-10);
  const double c = dot(u, u2);
  const Vec4 w = u + u2;
  return identity4() + outer(w, w) / (1.0 - c) - 2.0 * outer(u2, u);
}

// Spatial cross product inside E_u, right-handed: for u = e_t it is the
// ordinary cross product of the spatial parts.
inline Vec4 spatial_cross(const Vec4& u, const Vec4& a, const Vec4& b) {
  Vec4 lowered;
  for (int mu = 0; mu < 4; ++mu) {
    LinMap4 m;
    m.col(0) = Vec4::Unit(mu);
    m.col(1) = u;
    m.col(2) = a;
    m.col(3) = b;
    lowered[mu] = m.determinant();
  }
  return -lower(lowered);
}

// Generator of rotations of E_u about the spacelike vector w, rate |w|:
// x -> w x x (spatial cross product in E_u). Annihilates u.
inline LinMap4 rest_space_rotation_generator(const Vec4& u, const Vec4& w) {
  LinMap4 g;
  for (int j = 0; j < 4; ++j) g.col(j) = spatial_cross(u, w, Vec4::Unit(j));
  return g;
}

// Right-handed orthonormal basis of E_u, built from the chart's spatial axes.
inline std::array<Vec4, 3> rest_space_basis(const Vec4& u) {
  const LinMap4 p = projector(u);
  std::array<Vec4, 3> basis;
  int found = 0;
  for (int axis = 1; axis <= 3 && found < 2; ++axis) {
    Vec4 e = p * Vec4::Unit(axis);
    for (int k = 0; k < found; ++k) e -= dot(basis[k], e) * basis[k];
    const double n = magnitude(e);
    if (n < 1e-6) continue;
    basis[found++] = e / n;
  }
  basis[2] = spatial_cross(u, basis[0], basis[1]);
  return basis;
}

// Rotation rate of a g-antisymmetric generator of a single plane:
// sqrt(-tr(W W) / 2). Zero for pure boosts or nilpotent maps.
inline double generator_rate(const LinMap4& w) {
  return std::sqrt(std::max(0.0, -0.5 * (w * w).trace()));
}

// e^{sA} for g-antisymmetric A. Simple rotation generators (A^3 = -theta^2 A)
// use the closed Rodrigues form; everything else scaling-and-squaring with
// a Taylor kernel.
inline LinMap4 exp_generator(const LinMap4& a, double s) {
  const LinMap4 x = s * a;
  const double norm = x.norm();
  if (norm == 0.0) return identity4();

  const LinMap4 x2 = x * x;
  const double theta2 = -0.5 * x2.trace();
  if (theta2 > 0.0) {
    const LinMap4 x3 = x2 * x;
    if ((x3 + theta2 * x).norm() <= 1e-13 * std::max(1.0, norm * norm * norm)) {
      const double theta = std::sqrt(theta2);
      return identity4() + (std::sin(theta) / theta) * x +
             ((1.0 - std::cos(theta)) / theta2) * x2;
    }
  }

  int squarings = 0;
  double scaled = norm;
  while (scaled > 0.25) {
    scaled *= 0.5;
    ++squarings;
  }
  const LinMap4 y = x / std::ldexp(1.0, squarings);
  LinMap4 result = identity4();
  LinMap4 term = identity4();
  for (int k = 1; k <= 18; ++k) {
    term = term * y / static_cast<double>(k);
    result += term;
    if (term.norm() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

struct RotationAngle {
  double angle = 0.0;  // [0, pi]
  Vec4 axis = Vec4::Zero();
  bool has_axis = false;  // false when angle is 0 or pi (axis not determined
                          // by the antisymmetric part)
};

// Angle and axis of a proper rotation R of E_u. R must fix u and be
// isometric on E_u (residual 1e-8); reflections are rejected.
inline RotationAngle rotation_angle(const LinMap4& r, const Vec4& u) {
  require_four_velocity(u, "rotation_angle: u", 1e-10);
  constexpr double tol = 1e-8;
  if ((r * u - u).norm() > tol * std::max(1.0, u.norm())) {
    throw PreconditionError("rotation_angle: map does not fix u");
  }
  const auto basis = rest_space_basis(u);
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = dot(basis[i], r * basis[j]);
  if ((m.transpose() * m - Eigen::Matrix3d::Identity()).norm() > tol) {
    throw PreconditionError("rotation_angle: map is not isometric on E_u");
  }
  if (m.determinant() < 0.0) {
    throw PreconditionError("rotation_angle: map is a reflection on E_u");
  }

  const Eigen::Vector3d anti(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double sin_theta = 0.5 * anti.norm();
  const double cos_theta = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);

  RotationAngle out;
  out.angle = std::atan2(sin_theta, cos_theta);
  if (sin_theta > 1e-9) {
    const Eigen::Vector3d n = anti / anti.norm();
    out.axis = n[0] * basis[0] + n[1] * basis[1] + n[2] * basis[2];
    out.has_axis = true;
  }
  return out;
}

// Signed angle of v in the oriented plane (e1, e2); e1, e2 orthonormal spacelike.
inline double plane_angle(const Vec4& v, const Vec4& e1, const Vec4& e2) {
  return std::atan2(dot(v, e2), dot(v, e1));
}

// Wraps an angle increment into (-pi, pi].
inline double wrap_increment(double d) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  d = std::remainder(d, two_pi);
  return d;
}

}  // namespace relframe
