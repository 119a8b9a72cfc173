#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "relframe/error.hpp"
#include "relframe/minkowski.hpp"

namespace relframe {

// A proper-time parameterized world line with analytic derivatives.
// `initial_guess`, when set, seeds the orthogonal-time solver with an
// estimate of s(x); otherwise the solver scans the (finite) domain.
struct WorldLine {
  std::function<Vec4(double)> point;
  std::function<Vec4(double)> velocity;
  std::function<Vec4(double)> acceleration;
  double s_min = -std::numeric_limits<double>::infinity();
  double s_max = std::numeric_limits<double>::infinity();
  std::function<double(const Vec4&)> initial_guess;
};

// r(s) = o + s a u + e^{s b Omega} (x0 - o), a^2 - b^2 |Omega (x0 - o)|^2 = 1.
// The conventional orbit of lab angular velocity w has a = b = gamma.
class CircularOrbit {
 public:
  CircularOrbit(Vec4 center, Vec4 center_velocity, LinMap4 generator, Vec4 offset,
                double time_rate, double angular_rate)
      : o_(std::move(center)),
        u_(std::move(center_velocity)),
        omega_(std::move(generator)),
        q0_(std::move(offset)),
        a_(time_rate),
        b_(angular_rate) {
    require_four_velocity(u_, "CircularOrbit: center velocity");
    rate_ = generator_rate(omega_);
    if (!(rate_ > 0.0)) throw PreconditionError("CircularOrbit: generator has no rotation");
    const double scale = omega_.norm();
    if ((omega_ + adjoint(omega_)).norm() > 1e-12 * scale ||
        (omega_ * u_).norm() > 1e-12 * scale ||
        (omega_ * omega_ * omega_ + rate_ * rate_ * omega_).norm() > 1e-10 * scale * rate_ * rate_) {
      throw PreconditionError("CircularOrbit: generator must be a spatial rotation of E_u");
    }
    if (std::abs(dot(q0_, u_)) > 1e-12 * std::max(1.0, q0_.norm())) {
      throw PreconditionError("CircularOrbit: offset must lie in E_u");
    }
    omega_q0_ = omega_ * q0_;
    omega2_q0_ = omega_ * omega_q0_;
    speed_ = magnitude(omega_q0_);
    if (std::abs(a_ * a_ - b_ * b_ * speed_ * speed_ - 1.0) > 1e-12 * a_ * a_) {
      throw PreconditionError("CircularOrbit: normalization a^2 - b^2 |Omega q|^2 = 1 violated");
    }
  }

  Vec4 point(double s) const {
    const double phase = b_ * rate_ * s;
    return o_ + s * a_ * u_ + q0_ + (std::sin(phase) / rate_) * omega_q0_ +
           ((1.0 - std::cos(phase)) / (rate_ * rate_)) * omega2_q0_;
  }
  Vec4 velocity(double s) const {
    const double phase = b_ * rate_ * s;
    return a_ * u_ + b_ * (std::cos(phase) * omega_q0_ + (std::sin(phase) / rate_) * omega2_q0_);
  }
  Vec4 acceleration(double s) const {
    const double phase = b_ * rate_ * s;
    return b_ * b_ * (-rate_ * std::sin(phase) * omega_q0_ + std::cos(phase) * omega2_q0_);
  }

  // Smallest s > 0 with velocity(s) = velocity(0).
  double return_time() const { return 2.0 * std::numbers::pi / (b_ * rate_); }

  // Coordinate time between returns as seen from the center.
  double lab_period() const { return a_ * return_time(); }

  const Vec4& center() const { return o_; }
  const Vec4& center_velocity() const { return u_; }
  const LinMap4& generator() const { return omega_; }
  const Vec4& offset() const { return q0_; }
  double time_rate() const { return a_; }
  double angular_rate() const { return b_; }
  double rotation_rate() const { return rate_; }
  // |Omega (x0 - o)| = omega R
  double rim_speed() const { return speed_; }
  // Lab speed relative to the center four-velocity.
  double lab_speed() const { return b_ * speed_ / a_; }

  // Orientation of the orbital plane: radial direction and direction of motion.
  std::pair<Vec4, Vec4> orientation_plane() const { return {q0_, omega_q0_}; }

  WorldLine as_worldline() const {
    WorldLine w;
    const CircularOrbit self = *this;
    w.point = [self](double s) { return self.point(s); };
    w.velocity = [self](double s) { return self.velocity(s); };
    w.acceleration = [self](double s) { return self.acceleration(s); };
    w.initial_guess = [self](const Vec4& x) {
      return -dot(x - self.o_, self.u_) / self.a_;
    };
    return w;
  }

 private:
  Vec4 o_, u_;
  LinMap4 omega_;
  Vec4 q0_;
  double a_, b_;
  double rate_ = 0.0;
  double speed_ = 0.0;
  Vec4 omega_q0_, omega2_q0_;
};

// Conventional circular orbit around o + u R with lab angular velocity omega
// in the plane (e1, e2), rotating e1 towards e2, starting at o + radius e1.
inline CircularOrbit make_circular_orbit(const Vec4& o, const Vec4& u,
                                         const std::pair<Vec4, Vec4>& plane,
                                         double omega, double radius) {
  require_four_velocity(u, "make_circular_orbit: u");
  const auto& [e1, e2] = plane;
  constexpr double tol = 1e-12;
  if (std::abs(dot(e1, e1) - 1.0) > tol || std::abs(dot(e2, e2) - 1.0) > tol ||
      std::abs(dot(e1, e2)) > tol || std::abs(dot(e1, u)) > tol || std::abs(dot(e2, u)) > tol) {
    throw PreconditionError("make_circular_orbit: plane must be orthonormal and orthogonal to u");
  }
  if (!(omega > 0.0) || !(radius > 0.0)) {
    throw PreconditionError("make_circular_orbit: omega and radius must be positive");
  }
  const double v = omega * radius;
  if (v >= 1.0) throw DomainError("make_circular_orbit: superluminal orbit (omega * radius >= 1)");
  const double gamma = 1.0 / std::sqrt(1.0 - v * v);
  return CircularOrbit(o, u, omega * wedge(e2, e1), radius * e1, gamma, gamma);
}

// Standard lab setup: center at the origin at rest, rotation x -> y.
inline CircularOrbit make_lab_orbit(double omega, double radius) {
  return make_circular_orbit(Vec4::Zero(), Vec4::Unit(0), {Vec4::Unit(1), Vec4::Unit(2)},
                             omega, radius);
}

inline double return_time(const CircularOrbit& r) { return r.return_time(); }

// Numerical return time for a generic world line: smallest s in (0, s_search]
// where the velocity comes back to velocity(0) (component norm < 1e-10).
inline std::optional<double> return_time(const WorldLine& r, double s_search,
                                         std::size_t samples = 4096) {
  const Vec4 v0 = r.velocity(0.0);
  // Critical points of |v(s) - v0|^2 are roots of this.
  auto slope = [&](double s) { return (r.velocity(s) - v0).dot(r.acceleration(s)); };
  const double h = s_search / static_cast<double>(samples);
  double lo = h * 0.5;
  double f_lo = slope(lo);
  for (std::size_t i = 1; i <= samples; ++i) {
    const double hi = h * static_cast<double>(i);
    const double f_hi = slope(hi);
    if (f_lo < 0.0 && f_hi >= 0.0) {
      double a = lo, b = hi;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        (slope(m) < 0.0 ? a : b) = m;
      }
      const double s = 0.5 * (a + b);
      if ((r.velocity(s) - v0).norm() < 1e-10) return s;
    }
    lo = hi;
    f_lo = f_hi;
  }
  return std::nullopt;
}

// s(x): the proper time of r at which x - r(s) is orthogonal to r'(s).
// Newton iteration with derivative 1 + (x - r(s)).r''(s); aborts when that
// denominator drops below 0.1 (outside the tubular neighbourhood).
inline double orthogonal_time(const WorldLine& r, const Vec4& x,
                              std::optional<double> hint = std::nullopt) {
  auto residual = [&](double s) { return dot(x - r.point(s), r.velocity(s)); };
  auto denominator = [&](double s) { return 1.0 + dot(x - r.point(s), r.acceleration(s)); };

  double s = 0.0;
  if (hint) {
    s = *hint;
  } else if (r.initial_guess) {
    s = r.initial_guess(x);
  } else {
    if (!std::isfinite(r.s_min) || !std::isfinite(r.s_max)) {
      throw PreconditionError("orthogonal_time: need a hint or a finite domain to scan");
    }
    constexpr int samples = 1024;
    const double h = (r.s_max - r.s_min) / samples;
    std::vector<double> roots;
    double prev = residual(r.s_min);
    for (int i = 1; i <= samples; ++i) {
      const double si = r.s_min + h * i;
      const double cur = residual(si);
      if ((prev < 0.0) != (cur < 0.0)) {
        const double mid = si - 0.5 * h;
        if (denominator(mid) > 0.0) roots.push_back(mid);
      }
      prev = cur;
    }
    if (roots.empty()) throw ConvergenceError("orthogonal_time: no root found in the domain");
    if (roots.size() > 1) throw DomainError("orthogonal_time: s(x) is not unique at this point");
    s = roots.front();
  }

  auto accept = [&](double root) {
    if (denominator(root) < 0.1) {
      throw DomainError("orthogonal_time: point is beyond the curvature horizon");
    }
    return root;
  };
  for (int it = 0; it < 50; ++it) {
    const double f = residual(s);
    if (std::abs(f) < 1e-12) return accept(s);
    const double d = denominator(s);
    if (d < 0.1) throw DomainError("orthogonal_time: point is beyond the curvature horizon");
    const double step = f / d;
    s -= step;
    // Residual floor set by rounding in x - r(s) for large coordinates.
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(s))) return accept(s);
  }
  if (std::abs(residual(s)) < 1e-12) return accept(s);
  throw ConvergenceError("orthogonal_time: Newton iteration did not converge in 50 steps");
}

}  // namespace relframe
