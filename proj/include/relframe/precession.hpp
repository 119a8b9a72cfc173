#pragma once

// Foucault precession of a gyroscope in a co-moving frame, Thomas rotation of
// a returning gyroscope, and their comparison.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relframe/error.hpp"
#include "relframe/frames.hpp"
#include "relframe/minkowski.hpp"
#include "relframe/transport.hpp"
#include "relframe/worldline.hpp"

namespace relframe {

struct TimedMap {
  double s = 0.0;
  LinMap4 map = LinMap4::Zero();
};

// Orthonormal, oriented plane (e1, e2) inside a rest space.
struct OrientedPlane {
  Vec4 e1 = Vec4::Zero();
  Vec4 e2 = Vec4::Zero();
};

// Projects a and b into E_u and orthonormalizes them, keeping the sense a -> b.
inline OrientedPlane oriented_rest_plane(const Vec4& u, const Vec4& a, const Vec4& b) {
  const LinMap4 p = projector(u);
  Vec4 e1 = p * a;
  const double n1 = magnitude(e1);
  if (n1 < 1e-12) throw PreconditionError("oriented_rest_plane: degenerate first vector");
  e1 /= n1;
  Vec4 e2 = p * b;
  e2 -= dot(e1, e2) * e1;
  const double n2 = magnitude(e2);
  if (n2 < 1e-12) throw PreconditionError("oriented_rest_plane: degenerate plane");
  return {e1, e2 / n2};
}

// Unsigned angle between two spacelike vectors of the same rest space.
inline double angle_between(const Vec4& a, const Vec4& b) {
  const double c = dot(a, b);
  const Vec4 perp = b - (c / dot(a, a)) * a;
  return std::atan2(magnitude(perp) * magnitude(a), c);
}

// Accumulates a continuous angle from successive samples in (-pi, pi].
class AngleUnwrapper {
 public:
  void push(double angle) {
    if (started_) total_ += wrap_increment(angle - last_);
    last_ = angle;
    started_ = true;
  }
  double total() const { return total_; }

 private:
  bool started_ = false;
  double last_ = 0.0;
  double total_ = 0.0;
};

// ---------------------------------------------------------------------------
// Foucault precession

struct PrecessionReport {
  bool meaningful = false;
  double antisymmetry_residual = 0.0;  // max over samples, relative
  std::vector<TimedMap> omega0_samples;       // -A^-1 A'
  std::vector<TimedMap> omega_samples;        // -P(s) A' A^-1
  std::vector<TimedMap> frame_angvel_samples;  // angular velocity of the frame at r(s)
};

struct PrecessionOptions {
  double meaningful_tolerance = 1e-6;
  std::size_t sample_stride = 1;
  bool frame_angular_velocity = true;
  TransportOptions transport{};
};

// Size of the symmetric part of a map of E_{r'(0)} relative to max(|m|, scale).
inline double relative_antisymmetry_residual(const LinMap4& m, double scale = 0.0) {
  const double n = std::max(m.norm(), scale);
  if (n < 1e-12) return 0.0;
  return symmetric_part(m).norm() / n;
}

// -A^-1 A' and its antisymmetry residual measured against the curve's own
// rate scale |r' ^ r''|.
inline double omega0_residual(const WorldLine& r, const TransportState& st) {
  const double scale = wedge(r.velocity(st.s), r.acceleration(st.s)).norm();
  return relative_antisymmetry_residual(-st.A_inv * st.A_dot, scale);
}

// Foucault precession -A' A^-1 as a map of E_{r'(s)}. The P' part of A' only
// feeds the r'(s) direction, so it is projected away.
inline LinMap4 foucault_omega(const TransportState& st) { return -st.Ps * st.A_dot * st.A_inv; }

inline PrecessionReport precession_report(const FrameField& f, const WorldLine& r,
                                          const TransportRun& run, const PrecessionOptions& opt) {
  PrecessionReport rep;
  const std::size_t stride = std::max<std::size_t>(1, opt.sample_stride);
  for (std::size_t i = 0; i < run.states.size(); ++i) {
    const TransportState& st = run.states[i];
    const LinMap4 omega0 = -st.A_inv * st.A_dot;
    rep.antisymmetry_residual = std::max(rep.antisymmetry_residual, omega0_residual(r, st));
    if (i % stride != 0 && i + 1 != run.states.size()) continue;
    rep.omega0_samples.push_back({st.s, omega0});
    rep.omega_samples.push_back({st.s, foucault_omega(st)});
    if (opt.frame_angular_velocity) {
      rep.frame_angvel_samples.push_back({st.s, angular_velocity(f, r.point(st.s))});
    }
  }
  rep.meaningful = rep.antisymmetry_residual < opt.meaningful_tolerance;
  return rep;
}

inline PrecessionReport foucault_precession(const FrameField& f, const WorldLine& r, double s_max,
                                            std::size_t steps, const PrecessionOptions& opt = {}) {
  const TransportRun run = frame_transport(f, r, s_max, steps, Vec4::Zero(), opt.transport);
  return precession_report(f, r, run, opt);
}

// Solves h0' = -(A^-1 A') h0 alongside the Lie transport and, independently,
// z' = (r' ^ r'') z. Both are returned per grid point; h0 = A^-1 z up to
// integration error.
inline std::vector<GyroState> integrate_gyro_in_frame(const FrameField& f, const WorldLine& r,
                                                      const Vec4& z0, double s_max,
                                                      std::size_t steps,
                                                      const PrecessionOptions& opt = {}) {
  const Vec4 u0 = r.velocity(0.0);
  if (std::abs(dot(z0, u0)) > 1e-10 * std::max(1.0, z0.norm())) {
    throw PreconditionError("integrate_gyro_in_frame: z0 must be orthogonal to r'(0)");
  }
  const TransportRun run = frame_transport(f, r, s_max, steps, z0, opt.transport);
  for (const TransportState& st : run.states) {
    if (omega0_residual(r, st) >= opt.meaningful_tolerance) {
      throw PreconditionError(
          "integrate_gyro_in_frame: Foucault precession is not meaningful (frame not rigid along "
          "the world line)");
    }
  }
  const std::vector<GyroState> fw = fermi_walker_trajectory(r, z0, s_max, steps);
  std::vector<GyroState> out;
  out.reserve(fw.size());
  for (std::size_t i = 0; i < fw.size(); ++i) out.push_back({fw[i].s, fw[i].z, run.h0[i]});
  return out;
}

// ---------------------------------------------------------------------------
// Thomas rotation

struct ThomasRotation {
  double s_T = 0.0;
  double angle = 0.0;  // principal, [0, pi]
  Vec4 axis = Vec4::Zero();
  bool has_axis = false;
  LinMap4 rotation = identity4();  // z_i(0) -> z_i(s_T) on E_{r'(0)}
  double unwrapped = 0.0;           // accumulated magnitude, may exceed pi
  bool retrograde = false;          // sense opposite to the plane orientation
};

// Fermi-Walker transports an orthonormal triad of E_{r'(0)} over [0, s_T].
// The unwrapped angle follows boost(r'(s), r'(0)) z(s) continuously in the
// oriented plane; the boost family returns to the identity at s_T, so the
// winding it counts belongs to the Thomas rotation itself.
inline ThomasRotation thomas_rotation(const WorldLine& r, double s_T, std::size_t steps,
                                      const OrientedPlane& plane,
                                      std::optional<std::array<Vec4, 3>> triad = std::nullopt) {
  const Vec4 u0 = r.velocity(0.0);
  if ((r.velocity(s_T) - u0).norm() >= 1e-8) {
    throw PreconditionError("thomas_rotation: r'(s_T) != r'(0); Thomas rotation is undefined");
  }
  const std::array<Vec4, 3> z0 = triad ? *triad : rest_space_basis(u0);
  Eigen::Matrix<double, 4, 3> zm;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (std::abs(dot(z0[i], z0[j]) - (i == j ? 1.0 : 0.0)) > 1e-10 ||
          std::abs(dot(z0[i], u0)) > 1e-10) {
        throw PreconditionError("thomas_rotation: triad must be orthonormal in E_{r'(0)}");
      }
    }
    zm.col(i) = z0[i];
  }
  Eigen::Vector3d e1_coords;
  for (int i = 0; i < 3; ++i) e1_coords[i] = dot(z0[i], plane.e1);

  AngleUnwrapper unwrap;
  const Eigen::Matrix<double, 4, 3> zt = fermi_walker_transport_columns<3>(
      r, zm, s_T, steps, [&](double s, const Eigen::Matrix<double, 4, 3>& z) {
        const Vec4 w = boost(r.velocity(s), u0) * (z * e1_coords);
        unwrap.push(plane_angle(w, plane.e1, plane.e2));
      });

  ThomasRotation out;
  out.s_T = s_T;
  out.rotation = -outer(r.velocity(s_T), u0);
  for (int i = 0; i < 3; ++i) out.rotation += outer(zt.col(i), z0[i]);
  const RotationAngle ra = rotation_angle(out.rotation, u0);
  out.angle = ra.angle;
  out.axis = ra.axis;
  out.has_axis = ra.has_axis;
  out.unwrapped = std::abs(unwrap.total());
  out.retrograde = unwrap.total() < 0.0;
  return out;
}

inline OrientedPlane orbit_plane(const CircularOrbit& r) {
  const auto [a, b] = r.orientation_plane();
  return oriented_rest_plane(r.velocity(0.0), a, b);
}

inline ThomasRotation thomas_rotation(const CircularOrbit& r, std::size_t steps) {
  return thomas_rotation(r.as_worldline(), r.return_time(), steps, orbit_plane(r));
}

// ---------------------------------------------------------------------------
// Foucault precession versus Thomas rotation

struct RotationComparison {
  double s_T = 0.0;
  double thomas_angle = 0.0;    // principal, from the cosine of z(0).N^-1 z(s_T)
  double foucault_angle = 0.0;  // principal, from the cosine of z(0).A(s_T)^-1 z(s_T)
  double thomas_unwrapped = 0.0;    // accumulated magnitudes
  double foucault_unwrapped = 0.0;  // h0(s) followed continuously
  double condition_e_residual = 0.0;  // |A(s_T) - N P(0)|
  LinMap4 N = identity4();
  double antisymmetry_residual = 0.0;

  // Condition e holds and the two principal angles coincide.
  bool agree(double condition_tol = 1e-6, double angle_tol = 1e-5) const {
    return condition_e_residual < condition_tol &&
           std::abs(thomas_angle - foucault_angle) < angle_tol;
  }
};

inline RotationComparison compare_foucault_vs_thomas(const FrameField& f, const WorldLine& r,
                                                     double s_T, std::size_t steps,
                                                     const OrientedPlane& plane,
                                                     const PrecessionOptions& opt = {}) {
  RotationComparison cmp;
  cmp.s_T = s_T;
  const ThomasRotation thomas = thomas_rotation(r, s_T, steps, plane);

  const Vec4 z0 = plane.e1;
  const TransportRun run = frame_transport(f, r, s_T, steps, z0, opt.transport);
  for (const TransportState& st : run.states) {
    cmp.antisymmetry_residual = std::max(cmp.antisymmetry_residual, omega0_residual(r, st));
  }
  if (!(cmp.antisymmetry_residual < opt.meaningful_tolerance)) {
    throw PreconditionError(
        "compare: Foucault precession is not meaningful in this frame (relative antisymmetry "
        "residual " + std::to_string(cmp.antisymmetry_residual) + "); the frame is not rigid");
  }

  const Vec4 z_end = fermi_walker_transport(r, z0, s_T, steps).z;
  const TransportState& end = run.states.back();
  cmp.foucault_angle = angle_between(z0, end.A_inv * z_end);
  cmp.thomas_angle = angle_between(z0, cmp.N.inverse() * z_end);
  cmp.condition_e_residual = (end.A - cmp.N * end.P0).norm();
  cmp.thomas_unwrapped = thomas.unwrapped;

  AngleUnwrapper unwrap;
  for (const Vec4& h : run.h0) unwrap.push(plane_angle(h, plane.e1, plane.e2));
  cmp.foucault_unwrapped = std::abs(unwrap.total());
  return cmp;
}

// ---------------------------------------------------------------------------
// The same world line as a space point of several frames

struct FrameAngularVelocity {
  std::string label;
  LinMap4 angular_velocity = LinMap4::Zero();
  double rate = 0.0;
};

struct WorldLineAngularVelocityDemo {
  double s = 0.0;
  std::vector<FrameAngularVelocity> frames;
  double min_pairwise_difference = 0.0;
};

// Builds frames around r (Fermi-Walker, boost, boost with Gamma, and the
// conventional rotating frame when r is one of its space points) and reports
// their angular velocities at r(s).
inline WorldLineAngularVelocityDemo worldline_angular_velocity_demo(const CircularOrbit& r,
                                                                    const LinMap4& gamma,
                                                                    double s) {
  WorldLineAngularVelocityDemo demo;
  demo.s = s;
  const auto add = [&](std::string label, const LinMap4& w) {
    demo.frames.push_back({std::move(label), w, generator_rate(w)});
  };
  add("fermi_walker", custom_frame_angular_velocity_analytic(
                          make_custom_frame(r, TransportVariant::fermi_walker), s));
  add("boost", custom_frame_angular_velocity_analytic(make_custom_frame(r, TransportVariant::boost), s));
  add("boost+gamma", custom_frame_angular_velocity_analytic(
                         make_custom_frame(r, TransportVariant::boost, gamma), s));
  if (std::abs(r.time_rate() - r.angular_rate()) < 1e-12 * r.time_rate()) {
    const RotatingFrame conventional(r.center(), r.center_velocity(), r.generator(),
                                     make_rotating_profile(ProfileKind::conventional, 1.0));
    add("conventional", angular_velocity(conventional.field(), r.point(s)));
  }
  demo.min_pairwise_difference = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < demo.frames.size(); ++i)
    for (std::size_t j = i + 1; j < demo.frames.size(); ++j)
      demo.min_pairwise_difference =
          std::min(demo.min_pairwise_difference,
                   (demo.frames[i].angular_velocity - demo.frames[j].angular_velocity).norm());
  return demo;
}

}  // namespace relframe
