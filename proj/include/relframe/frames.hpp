#pragma once

// Reference frames: the uniformly rotating family U = alpha(k) u + beta(k) Omega(x - o)
// with k = |Omega(x - o)|^2, the frames built around a single world line from a
// transport family H(s), and the frame diagnostics (angular velocity, rigidity).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "relframe/error.hpp"
#include "relframe/frame_field.hpp"
#include "relframe/minkowski.hpp"
#include "relframe/transport.hpp"
#include "relframe/worldline.hpp"

namespace relframe {

// ---------------------------------------------------------------------------
// Diagnostics valid for any frame

// Vorticity -1/2 P (D^U) P with (D^U)_ab = D_a U_b - D_b U_a, which as a map is
// DU* - DU; equals P DU P when the frame is rigid at x.
inline LinMap4 angular_velocity(const FrameField& f, const Vec4& x) {
  const LinMap4 p = projector(f.velocity(x));
  const LinMap4 du = f.jacobian(x);
  return 0.5 * p * (du - adjoint(du)) * p;
}

// Size of the metric-symmetric part of P DU P relative to max(|P DU P|, |DU|);
// 0 iff the frame is rigid at x. The |DU| floor keeps frames with vanishing
// vorticity but nonzero acceleration (P DU P = 0) from reading noise / noise.
inline double rigidity_residual(const FrameField& f, const Vec4& x) {
  const LinMap4 p = projector(f.velocity(x));
  const LinMap4 du = f.jacobian(x);
  const LinMap4 m = p * du * p;
  const double n = std::max(m.norm(), du.norm());
  if (n < 1e-14) return 0.0;
  return symmetric_part(m).norm() / n;
}

// ---------------------------------------------------------------------------
// Rotating profiles alpha(k), beta(k)

enum class ProfileKind { conventional, trocheris_takeno, modified, constant_a };

inline std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::conventional: return "conventional";
    case ProfileKind::trocheris_takeno: return "trocheris_takeno";
    case ProfileKind::modified: return "modified";
    case ProfileKind::constant_a: return "constant_a";
  }
  return "?";
}

struct ProfileValue {
  double alpha = 1.0;
  double beta = 1.0;
  double dalpha = 0.0;  // d alpha / dk
  double dbeta = 0.0;   // d beta / dk
};

class RotatingProfile {
 public:
  RotatingProfile(ProfileKind kind, double a) : kind_(kind), a_(a) {}

  ProfileKind kind() const { return kind_; }
  double parameter() const { return a_; }

  bool in_domain(double k) const {
    if (!(k >= 0.0) || !std::isfinite(k)) return false;
    switch (kind_) {
      case ProfileKind::conventional: return a_ * a_ * k < 1.0;
      case ProfileKind::constant_a: return k > 0.0;
      default: return true;
    }
  }

  ProfileValue evaluate(double k) const {
    if (!in_domain(k)) {
      throw DomainError(std::string("rotating profile ") + std::string(to_string(kind_)) +
                        " evaluated outside its domain (k = " + std::to_string(k) + ")");
    }
    ProfileValue p;
    switch (kind_) {
      case ProfileKind::conventional: {
        // The rigid family: alpha = (1 - a^2 k)^-1/2, beta = a alpha.
        const double d = 1.0 - a_ * a_ * k;
        const double inv = 1.0 / std::sqrt(d);
        const double inv3 = inv / d;
        p.alpha = inv;
        p.beta = a_ * inv;
        p.dalpha = 0.5 * a_ * a_ * inv3;
        p.dbeta = 0.5 * a_ * a_ * a_ * inv3;
        break;
      }
      case ProfileKind::trocheris_takeno: {
        const double rho = std::sqrt(k);
        p.alpha = std::cosh(rho);
        if (rho < 1e-4) {
          // Series about k = 0: sinh(rho)/rho = 1 + k/6 + k^2/120 + ...
          p.beta = 1.0 + k / 6.0 + k * k / 120.0;
          p.dalpha = 0.5 + k / 12.0 + k * k / 240.0;
          p.dbeta = 1.0 / 6.0 + k / 60.0;
        } else {
          const double sh = std::sinh(rho);
          p.beta = sh / rho;
          p.dalpha = sh / (2.0 * rho);
          p.dbeta = (rho * std::cosh(rho) - sh) / (2.0 * rho * rho * rho);
        }
        break;
      }
      case ProfileKind::modified: {
        p.alpha = std::sqrt(1.0 + k);
        p.beta = 1.0;
        p.dalpha = 0.5 / p.alpha;
        p.dbeta = 0.0;
        break;
      }
      case ProfileKind::constant_a: {
        const double c = std::sqrt(a_ * a_ - 1.0);
        p.alpha = a_;
        p.beta = c / std::sqrt(k);
        p.dalpha = 0.0;
        p.dbeta = -0.5 * c / (k * std::sqrt(k));
        break;
      }
    }
    return p;
  }

 private:
  ProfileKind kind_;
  double a_;
};

inline RotatingProfile make_rotating_profile(ProfileKind kind, double a = 1.0) {
  if (kind == ProfileKind::conventional && !(a >= 1.0)) {
    throw PreconditionError("make_rotating_profile: conventional profile needs a >= 1");
  }
  if (kind == ProfileKind::constant_a && !(a > 1.0)) {
    throw PreconditionError("make_rotating_profile: constant_a profile needs a > 1");
  }
  return RotatingProfile(kind, a);
}

// (2 alpha' - alpha beta^2, 2 beta' - beta^3): both vanish exactly on the
// rigid family.
inline std::pair<double, double> profile_ode_residual(const RotatingProfile& p, double k) {
  const ProfileValue v = p.evaluate(k);
  return {2.0 * v.dalpha - v.alpha * v.beta * v.beta, 2.0 * v.dbeta - v.beta * v.beta * v.beta};
}

// ---------------------------------------------------------------------------
// Rotating frame

class RotatingFrame {
 public:
  RotatingFrame(Vec4 center, Vec4 axis_velocity, LinMap4 generator, RotatingProfile profile)
      : o_(std::move(center)), u_(std::move(axis_velocity)), omega_(std::move(generator)),
        profile_(profile) {
    require_four_velocity(u_, "RotatingFrame: axis velocity");
    const double scale = omega_.norm();
    if (!(scale > 0.0) || (omega_ + adjoint(omega_)).norm() > 1e-12 * scale ||
        (omega_ * u_).norm() > 1e-12 * scale) {
      throw PreconditionError("RotatingFrame: generator must be g-antisymmetric with Omega u = 0");
    }
  }

  double k(const Vec4& x) const {
    const Vec4 w = omega_ * (x - o_);
    return dot(w, w);
  }

  Vec4 velocity(const Vec4& x) const {
    const Vec4 q = x - o_;
    const Vec4 oq = omega_ * q;
    const ProfileValue p = profile_.evaluate(dot(oq, oq));
    return p.alpha * u_ + p.beta * oq;
  }

  // DU = -2 (alpha' u + beta' Omega q) (x) Omega^2 q + beta Omega
  LinMap4 jacobian(const Vec4& x) const {
    const Vec4 q = x - o_;
    const Vec4 oq = omega_ * q;
    const Vec4 o2q = omega_ * oq;
    const ProfileValue p = profile_.evaluate(dot(oq, oq));
    return -2.0 * outer(p.dalpha * u_ + p.dbeta * oq, o2q) + p.beta * omega_;
  }

  FrameField field() const {
    const RotatingFrame self = *this;
    return {[self](const Vec4& x) { return self.velocity(x); },
            [self](const Vec4& x) { return self.jacobian(x); }};
  }

  // The space point through x0: s -> o + s alpha u + e^{s beta Omega}(x0 - o).
  CircularOrbit space_point(const Vec4& x0) const {
    const Vec4 q = x0 - o_;
    const Vec4 q_perp = q + u_ * dot(u_, q);  // component in E_u
    const Vec4 center = o_ + (q - q_perp);
    const ProfileValue p = profile_.evaluate(k(x0));
    return CircularOrbit(center, u_, omega_, q_perp, p.alpha, p.beta);
  }

  const Vec4& center() const { return o_; }
  const Vec4& axis_velocity() const { return u_; }
  const LinMap4& generator() const { return omega_; }
  const RotatingProfile& profile() const { return profile_; }

 private:
  Vec4 o_, u_;
  LinMap4 omega_;
  RotatingProfile profile_;
};

// Lab-chart rotating frame: center at the origin at rest, rotation x -> y
// with rate omega.
inline RotatingFrame make_lab_rotating_frame(const RotatingProfile& profile, double omega) {
  return RotatingFrame(Vec4::Zero(), Vec4::Unit(0),
                       omega * wedge(Vec4::Unit(2), Vec4::Unit(1)), profile);
}

// ---------------------------------------------------------------------------
// Frames built around a single world line

// V(x) = r'(s) + H_G'(s) H_G(s)^-1 (x - r(s)) at s = s(x), U = V / |V|, where
// H_G(s) = H(s) e^{s Gamma}. Every such frame has r as a space point.
class CustomFrame {
 public:
  CustomFrame(WorldLine base, TransportFamily family, LinMap4 gamma)
      : r_(std::move(base)), family_(std::move(family)), gamma_(std::move(gamma)) {
    const Vec4 u0 = r_.velocity(0.0);
    const double scale = std::max(1.0, gamma_.norm());
    if ((gamma_ + adjoint(gamma_)).norm() > 1e-12 * scale) {
      throw PreconditionError("CustomFrame: Gamma must be g-antisymmetric");
    }
    if ((gamma_ * u0).norm() > 1e-12 * scale) {
      throw PreconditionError("CustomFrame: Gamma must annihilate r'(0)");
    }
    has_gamma_ = gamma_.norm() > 0.0;
  }

  // H_G(s) = H(s) e^{s Gamma}
  LinMap4 transport_operator(double s) const {
    const LinMap4 h = family_.op(s);
    return has_gamma_ ? LinMap4(h * exp_generator(gamma_, s)) : h;
  }

  // H_G' H_G^-1 = H' H^-1 + H Gamma H^-1
  LinMap4 transport_log_derivative(double s) const {
    LinMap4 k = family_.log_derivative(s);
    if (has_gamma_) {
      const LinMap4 h = family_.op(s);
      k += h * gamma_ * adjoint(h);
    }
    return k;
  }

  Vec4 velocity(const Vec4& x) const {
    const double s = orthogonal_time(r_, x);
    const Vec4 v = r_.velocity(s) + transport_log_derivative(s) * (x - r_.point(s));
    const double vv = dot(v, v);
    if (!(vv < 0.0)) throw DomainError("CustomFrame: V(x) is not timelike (too far from the world line)");
    return v / std::sqrt(-vv);
  }

  LinMap4 jacobian(const Vec4& x) const {
    return finite_difference_jacobian([this](const Vec4& y) { return velocity(y); }, x);
  }

  FrameField field() const {
    const CustomFrame self = *this;
    return {[self](const Vec4& x) { return self.velocity(x); },
            [self](const Vec4& x) { return self.jacobian(x); }};
  }

  const WorldLine& base() const { return r_; }
  const TransportFamily& family() const { return family_; }
  const LinMap4& extra_generator() const { return gamma_; }

 private:
  WorldLine r_;
  TransportFamily family_;
  LinMap4 gamma_;
  bool has_gamma_ = false;
};

inline CustomFrame make_custom_frame(const CircularOrbit& r, TransportVariant variant,
                                     const LinMap4& gamma = LinMap4::Zero()) {
  const WorldLine w = r.as_worldline();
  return CustomFrame(w, variant == TransportVariant::boost ? boost_family(w) : fermi_walker_family(r),
                     gamma);
}

inline CustomFrame make_custom_frame(const WorldLine& r, TransportVariant variant,
                                     const LinMap4& gamma = LinMap4::Zero(),
                                     double fw_max_step = 1e-3) {
  return CustomFrame(
      r, variant == TransportVariant::boost ? boost_family(r) : fermi_walker_family(r, fw_max_step),
      gamma);
}

// Angular velocity at r(s) from the transport family alone:
// P(s) H'(s) H(s)^-1 P(s) + H(s) Gamma H(s)^-1.
inline LinMap4 custom_frame_angular_velocity_analytic(const CustomFrame& f, double s) {
  const LinMap4 p = projector(f.base().velocity(s));
  LinMap4 w = p * f.family().log_derivative(s) * p;
  if (f.extra_generator().norm() > 0.0) {
    const LinMap4 h = f.family().op(s);
    w += h * f.extra_generator() * adjoint(h);
  }
  return w;
}

// Boost family in closed form: with c = r'(0).r'(s),
// H' H^-1 = (r'(0) + r'(s)) ^ r''(s) / (1 - c) and the angular velocity at
// r(s) is (r'(0) + c r'(s)) ^ r''(s) / (1 - c).
inline LinMap4 boost_family_log_derivative(const WorldLine& r, double s) {
  const Vec4 u0 = r.velocity(0.0);
  const Vec4 u = r.velocity(s);
  return wedge(u0 + u, r.acceleration(s)) / (1.0 - dot(u0, u));
}

inline LinMap4 boost_family_angular_velocity(const WorldLine& r, double s) {
  const Vec4 u0 = r.velocity(0.0);
  const Vec4 u = r.velocity(s);
  const double c = dot(u0, u);
  return wedge(u0 + c * u, r.acceleration(s)) / (1.0 - c);
}

}  // namespace relframe
