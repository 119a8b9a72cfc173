#pragma once

// Transport along a world line: Lie transport L(s) = D R_s(x0) of a frame's
// flow, its compression A(s) = P(s) L(s) P(0) between rest spaces,
// Fermi-Walker transport, and the transport families H(s) with
// H(s) r'(0) = r'(s).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "relframe/error.hpp"
#include "relframe/frame_field.hpp"
#include "relframe/minkowski.hpp"
#include "relframe/rk4.hpp"
#include "relframe/worldline.hpp"

namespace relframe {

enum class TransportVariant { boost, fermi_walker };

inline const char* to_string(TransportVariant v) {
  return v == TransportVariant::boost ? "boost" : "fermi_walker";
}

// A one-parameter family of Lorentz transformations with H(s) r'(0) = r'(s),
// together with its logarithmic derivative H'(s) H(s)^-1.
struct TransportFamily {
  TransportVariant variant = TransportVariant::boost;
  std::function<LinMap4(double)> op;
  std::function<LinMap4(double)> log_derivative;
};

// d/ds of boost(u0, u(s)) given u = u(s), a = u'(s).
inline LinMap4 boost_derivative(const Vec4& u0, const Vec4& u, const Vec4& a) {
  const Vec4 w = u0 + u;
  const double c = dot(u0, u);
  const double dc = dot(u0, a);
  const double inv = 1.0 / (1.0 - c);
  return (outer(a, w) + outer(w, a)) * inv + outer(w, w) * (dc * inv * inv) - 2.0 * outer(a, u0);
}

inline TransportFamily boost_family(const WorldLine& r) {
  const Vec4 u0 = r.velocity(0.0);
  TransportFamily fam;
  fam.variant = TransportVariant::boost;
  fam.op = [r, u0](double s) { return boost(u0, r.velocity(s)); };
  fam.log_derivative = [r, u0](double s) {
    const Vec4 u = r.velocity(s);
    // Lorentz transformations satisfy H^-1 = H*.
    return LinMap4(boost_derivative(u0, u, r.acceleration(s)) * adjoint(boost(u0, u)));
  };
  return fam;
}

namespace detail {

inline std::size_t steps_for(double s, double max_step) {
  return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(std::abs(s) / max_step)));
}

}  // namespace detail

// H(s) for Fermi-Walker transport: H' = (r' ^ r'') H, H(0) = 1, by RK4.
inline LinMap4 fermi_walker_operator(const WorldLine& r, double s, std::size_t steps) {
  if (s == 0.0) return identity4();
  auto rhs = [&r](double t, const LinMap4& h) -> LinMap4 {
    return wedge(r.velocity(t), r.acceleration(t)) * h;
  };
  return detail::rk4_integrate(rhs, 0.0, s, identity4(), steps);
}

// Numerically integrated Fermi-Walker family for an arbitrary world line;
// each evaluation integrates from 0 with steps no longer than max_step.
inline TransportFamily fermi_walker_family(const WorldLine& r, double max_step = 1e-3) {
  TransportFamily fam;
  fam.variant = TransportVariant::fermi_walker;
  fam.op = [r, max_step](double s) {
    return fermi_walker_operator(r, s, detail::steps_for(s, max_step));
  };
  fam.log_derivative = [r](double s) { return wedge(r.velocity(s), r.acceleration(s)); };
  return fam;
}

// Closed form on a circular orbit: with R(s) = e^{s b Omega} carrying r'(0)
// to r'(s), H(s) = R(s) exp(s (r'(0) ^ r''(0) - b Omega)).
inline LinMap4 fermi_walker_operator(const CircularOrbit& r, double s) {
  const LinMap4 spin = r.angular_rate() * r.generator();
  const LinMap4 body = wedge(r.velocity(0.0), r.acceleration(0.0)) - spin;
  return exp_generator(spin, s) * exp_generator(body, s);
}

inline TransportFamily fermi_walker_family(const CircularOrbit& r) {
  TransportFamily fam;
  fam.variant = TransportVariant::fermi_walker;
  fam.op = [r](double s) { return fermi_walker_operator(r, s); };
  fam.log_derivative = [r](double s) { return wedge(r.velocity(s), r.acceleration(s)); };
  return fam;
}

inline LinMap4 transport_operator_H(const WorldLine& r, TransportVariant variant, double s,
                                    std::size_t steps = 4096) {
  if (variant == TransportVariant::boost) return boost(r.velocity(0.0), r.velocity(s));
  return fermi_walker_operator(r, s, steps);
}

// ---------------------------------------------------------------------------
// Lie transport

struct TransportState {
  double s = 0.0;
  LinMap4 L = identity4();
  LinMap4 A = identity4();      // P(s) L(s) P(0)
  LinMap4 A_inv = identity4();  // P(0) L(s)^-1 P(s)
  LinMap4 A_dot = LinMap4::Zero();
  LinMap4 P0 = identity4();
  LinMap4 Ps = identity4();
};

struct TransportOptions {
  bool check_integral_curve = true;
  bool check_halving = true;
  double halving_tolerance = 1e-6;
};

struct TransportRun {
  std::vector<TransportState> states;  // one per grid point, s = 0 first
  std::vector<Vec4> h0;                // frame-space gyro representative, same grid
};

namespace detail {

inline void require_integral_curve(const FrameField& f, const WorldLine& r, double s_max) {
  constexpr int samples = 16;
  for (int i = 0; i <= samples; ++i) {
    const double s = s_max * i / samples;
    if ((f.velocity(r.point(s)) - r.velocity(s)).norm() > 1e-8) {
      throw PreconditionError("world line is not an integral curve of the frame (s = " +
                              std::to_string(s) + ")");
    }
  }
}

// Caches the most recent Jacobian along the curve; RK4 evaluates the midpoint
// twice and the end point of one step is the start of the next.
class CurveJacobian {
 public:
  CurveJacobian(const FrameField& f, const WorldLine& r) : f_(f), r_(r) {}
  const LinMap4& at(double s) {
    if (!valid_ || std::abs(s - s_) > 1e-14 * std::max(1.0, std::abs(s))) {
      du_ = f_.jacobian(r_.point(s));
      s_ = s;
      valid_ = true;
    }
    return du_;
  }

 private:
  const FrameField& f_;
  const WorldLine& r_;
  bool valid_ = false;
  double s_ = 0.0;
  LinMap4 du_;
};

// L' = DU(r(s)) L and, coupled, h0' = -(A^-1 A') h0.
inline TransportRun run_frame_transport(const FrameField& f, const WorldLine& r, double s_max,
                                        std::size_t steps, const Vec4& h_initial) {
  using State = Eigen::Matrix<double, 4, 5>;
  const Vec4 u0 = r.velocity(0.0);
  const LinMap4 p0 = identity4() + outer(u0, u0);
  CurveJacobian du(f, r);

  auto make_state = [&](double s, const LinMap4& l) {
    const Vec4 u = r.velocity(s);
    const Vec4 acc = r.acceleration(s);
    TransportState st;
    st.s = s;
    st.L = l;
    st.P0 = p0;
    st.Ps = identity4() + outer(u, u);
    st.A = st.Ps * l * p0;
    st.A_inv = p0 * l.inverse() * st.Ps;
    const LinMap4 p_dot = outer(acc, u) + outer(u, acc);
    st.A_dot = p_dot * l * p0 + st.Ps * du.at(s) * l * p0;
    return st;
  };

  auto rhs = [&](double s, const State& y) -> State {
    const TransportState st = make_state(s, y.leftCols<4>());
    State dy;
    dy.leftCols<4>() = du.at(s) * st.L;
    dy.col(4) = -(st.A_inv * st.A_dot) * y.col(4);
    return dy;
  };

  State y0;
  y0.leftCols<4>() = identity4();
  y0.col(4) = h_initial;

  TransportRun run;
  run.states.reserve(steps + 1);
  run.h0.reserve(steps + 1);
  rk4_integrate(rhs, 0.0, s_max, y0, steps, [&](double s, const State& y) {
    run.states.push_back(make_state(s, y.leftCols<4>()));
    run.h0.push_back(y.col(4));
  });
  return run;
}

}  // namespace detail

// Lie transport plus the coupled frame-space gyro equation over [0, s_max].
// With check_halving, the run is repeated at half the step and rejected if
// the final L (or h0) moves by more than the tolerance.
inline TransportRun frame_transport(const FrameField& f, const WorldLine& r, double s_max,
                                    std::size_t steps, const Vec4& h_initial = Vec4::Zero(),
                                    const TransportOptions& opt = {}) {
  if (steps == 0) throw PreconditionError("frame_transport: step count must be positive");
  if (opt.check_integral_curve) detail::require_integral_curve(f, r, s_max);
  TransportRun run = detail::run_frame_transport(f, r, s_max, steps, h_initial);
  if (opt.check_halving) {
    const TransportRun fine = detail::run_frame_transport(f, r, s_max, 2 * steps, h_initial);
    const double dl = (fine.states.back().L - run.states.back().L).norm();
    const double dh = (fine.h0.back() - run.h0.back()).norm();
    if (dl > opt.halving_tolerance || dh > opt.halving_tolerance) {
      throw ConvergenceError("frame_transport: step rejected, halving changed L by " +
                             std::to_string(dl));
    }
  }
  return run;
}

inline TransportState integrate_lie_transport(const FrameField& f, const WorldLine& r, double s,
                                              std::size_t steps, const TransportOptions& opt = {}) {
  return frame_transport(f, r, s, steps, Vec4::Zero(), opt).states.back();
}

// R_t(x): the flow of the frame, dx/dt = U(x).
inline Vec4 integrate_flow(const FrameField& f, const Vec4& x, double t, std::size_t steps) {
  auto rhs = [&f](double, const Vec4& y) -> Vec4 { return f.velocity(y); };
  return detail::rk4_integrate(rhs, 0.0, t, Vec4(x), steps);
}

// ---------------------------------------------------------------------------
// Fermi-Walker transport: z' = (r' ^ r'') z = r' (r''.z) - r'' (r'.z)

struct GyroState {
  double s = 0.0;
  Vec4 z = Vec4::Zero();
  std::optional<Vec4> h0;  // A(s)^-1 z(s), filled when a frame is involved
};

// Transports the columns of z0 (any number of vectors); observe(s, Z) is
// called on every grid point.
template <int Cols, class Observer>
Eigen::Matrix<double, 4, Cols> fermi_walker_transport_columns(
    const WorldLine& r, const Eigen::Matrix<double, 4, Cols>& z0, double s, std::size_t steps,
    Observer&& observe) {
  using State = Eigen::Matrix<double, 4, Cols>;
  auto rhs = [&r](double t, const State& z) -> State {
    return wedge(r.velocity(t), r.acceleration(t)) * z;
  };
  return detail::rk4_integrate(rhs, 0.0, s, State(z0), steps, std::forward<Observer>(observe));
}

inline GyroState fermi_walker_transport(const WorldLine& r, const Vec4& z0, double s,
                                        std::size_t steps) {
  const Vec4 u0 = r.velocity(0.0);
  if (std::abs(dot(z0, u0)) > 1e-10 * std::max(1.0, z0.norm())) {
    throw PreconditionError("fermi_walker_transport: z0 must be orthogonal to r'(0)");
  }
  Eigen::Matrix<double, 4, 1> z = z0;
  z = fermi_walker_transport_columns<1>(r, z, s, steps, [](double, const auto&) {});
  return {s, z, std::nullopt};
}

inline std::vector<GyroState> fermi_walker_trajectory(const WorldLine& r, const Vec4& z0,
                                                      double s, std::size_t steps) {
  const Vec4 u0 = r.velocity(0.0);
  if (std::abs(dot(z0, u0)) > 1e-10 * std::max(1.0, z0.norm())) {
    throw PreconditionError("fermi_walker_trajectory: z0 must be orthogonal to r'(0)");
  }
  std::vector<GyroState> out;
  out.reserve(steps + 1);
  Eigen::Matrix<double, 4, 1> z = z0;
  fermi_walker_transport_columns<1>(r, z, s, steps, [&](double t, const auto& zt) {
    out.push_back({t, zt, std::nullopt});
  });
  return out;
}

}  // namespace relframe
