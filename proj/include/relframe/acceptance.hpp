#pragma once

// Acceptance criteria, shared by the acceptance test binary and
// `relframe selfcheck`. Each criterion is a list of checks; a criterion passes
// when all of its checks pass. `tolerance_scale` multiplies every upper-bound
// tolerance (lower bounds are physical thresholds and stay fixed).

#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "relframe/frames.hpp"
#include "relframe/minkowski.hpp"
#include "relframe/precession.hpp"
#include "relframe/transport.hpp"
#include "relframe/worldline.hpp"

namespace relframe::acceptance {

struct Check {
  std::string what;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  // within: |measured - expected| < tolerance; above: measured > expected.
  enum class Kind { within, above } kind = Kind::within;

  bool pass() const {
    if (!std::isfinite(measured)) return false;
    return kind == Kind::within ? std::abs(measured - expected) < tolerance : measured > expected;
  }
  // Fraction of the allowed band used; > 1 means failure.
  double load() const {
    if (!std::isfinite(measured)) return std::numeric_limits<double>::infinity();
    if (kind == Kind::within) {
      return tolerance > 0.0 ? std::abs(measured - expected) / tolerance
                             : std::numeric_limits<double>::infinity();
    }
    return measured > 0.0 ? expected / measured : std::numeric_limits<double>::infinity();
  }
};

struct CriterionResult {
  std::string id;
  std::string title;
  std::vector<Check> checks;
  std::string error;  // set when the criterion threw

  bool pass() const {
    if (!error.empty() || checks.empty()) return false;
    for (const Check& c : checks)
      if (!c.pass()) return false;
    return true;
  }
  // The failing check with the largest load, else the tightest passing one.
  const Check* decisive() const {
    const Check* best = nullptr;
    for (const Check& c : checks) {
      if (!best || (c.pass() == best->pass() ? c.load() > best->load() : !c.pass())) best = &c;
    }
    return best;
  }
};

struct Criterion {
  std::string id;
  std::string title;
  std::function<std::vector<Check>(double tolerance_scale)> run;
};

namespace detail {

inline Check within(std::string what, double measured, double expected, double tol) {
  return {std::move(what), measured, expected, tol, Check::Kind::within};
}
inline Check below(std::string what, double measured, double tol) {
  return within(std::move(what), measured, 0.0, tol);
}
inline Check above(std::string what, double measured, double threshold) {
  return {std::move(what), measured, threshold, 0.0, Check::Kind::above};
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

inline double thomas_angle_closed_form(double v) {
  return 2.0 * std::numbers::pi * (1.0 / std::sqrt(1.0 - v * v) - 1.0);
}

inline RotatingFrame lab_frame(ProfileKind kind, double a = 1.0) {
  return make_lab_rotating_frame(make_rotating_profile(kind, a), 1.0);
}

// Points of the disc of radius rho_max, spread in angle, time and height.
inline std::vector<Vec4> disc_points(double rho_max, int n) {
  std::vector<Vec4> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double f = (i + 0.5) / n;
    const double rho = rho_max * std::sqrt(f);
    pts.emplace_back(3.0 * f, rho * std::cos(golden * i), rho * std::sin(golden * i),
                     0.2 * std::sin(1.0 * i));
  }
  return pts;
}

}  // namespace detail

// 1. Rigidity dichotomy.
inline std::vector<Check> rigidity_dichotomy(double scale) {
  using namespace detail;
  std::vector<Check> out;
  for (double a : {1.0, 1.5}) {
    const RotatingFrame f = lab_frame(ProfileKind::conventional, a);
    for (double v : {0.3, 0.5, 0.8}) {
      // The a = 1.5 profile ends at k = 1/a^2; sample inside it.
      const double rho_max = std::min(v, 0.95 / a);
      double worst = 0.0;
      for (const Vec4& x : disc_points(rho_max, 50)) worst = std::max(worst, rigidity_residual(f.field(), x));
      out.push_back(below("conventional a=" + fmt(a) + " v=" + fmt(v) + " max residual", worst,
                          1e-8 * scale));
    }
  }
  const std::array<std::pair<ProfileKind, double>, 3> nonrigid{
      {{ProfileKind::trocheris_takeno, 1.0}, {ProfileKind::modified, 1.0},
       {ProfileKind::constant_a, 2.0}}};
  for (const auto& [kind, a] : nonrigid) {
    const RotatingFrame f = lab_frame(kind, a);
    const CircularOrbit orbit = f.space_point(Vec4(0.0, 0.5, 0.0, 0.0));
    double least = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 50; ++i) {
      least = std::min(least, rigidity_residual(f.field(), orbit.point(orbit.return_time() * i / 50.0)));
    }
    out.push_back(above(std::string(to_string(kind)) + " v=0.5 min residual on the orbit", least, 1e-3));
  }
  return out;
}

// 2. Profile ODE residuals.
inline std::vector<Check> profile_ode(double scale) {
  using namespace detail;
  std::vector<Check> out;
  for (double a : {1.0, 1.5, 2.0}) {
    const RotatingProfile p = make_rotating_profile(ProfileKind::conventional, a);
    double worst = 0.0;
    const int n = 400;
    for (int i = 1; i <= n; ++i) {
      const auto [r1, r2] = profile_ode_residual(p, 0.8 / (a * a) * i / n);
      worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    out.push_back(below("conventional a=" + fmt(a) + " max |residual| on (0, 0.8/a^2]", worst, 1e-12 * scale));
  }
  // Oracle: derivatives of cosh(sqrt k) and sinh(sqrt k)/sqrt k by Richardson
  // extrapolated central differences in long double.
  const long double k = 0.25L;
  auto alpha = [](long double x) { return std::cosh(std::sqrt(x)); };
  auto beta = [](long double x) { return std::sinh(std::sqrt(x)) / std::sqrt(x); };
  auto deriv = [&](auto fn) {
    auto c = [&](long double h) { return (fn(k + h) - fn(k - h)) / (2.0L * h); };
    const long double h = 1e-3L;
    return (4.0L * c(h / 2.0L) - c(h)) / 3.0L;
  };
  const long double a = alpha(k), b = beta(k);
  const double e1 = static_cast<double>(2.0L * deriv(alpha) - a * b * b);
  const double e2 = static_cast<double>(2.0L * deriv(beta) - b * b * b);
  const auto [m1, m2] = profile_ode_residual(make_rotating_profile(ProfileKind::trocheris_takeno), 0.25);
  out.push_back(within("trocheris_takeno k=0.25 first residual", m1, e1, 1e-9 * scale));
  out.push_back(within("trocheris_takeno k=0.25 second residual", m2, e2, 1e-9 * scale));
  return out;
}

// 3. Thomas rotation per lab revolution and its step convergence.
inline std::vector<Check> thomas_closed_form(double scale) {
  using namespace detail;
  std::vector<Check> out;
  for (double v : {0.3, 0.5, 0.8}) {
    const CircularOrbit orbit = make_lab_orbit(1.0, v);
    const double t1 = thomas_rotation(orbit, 1024).unwrapped;
    const double t2 = thomas_rotation(orbit, 2048).unwrapped;
    const double t4 = thomas_rotation(orbit, 4096).unwrapped;
    const double expected = thomas_angle_closed_form(v);
    out.push_back(within("v=" + fmt(v) + " unwrapped angle (relative)", t4 / expected, 1.0, 1e-6 * scale));
    // Observed order from successive differences; 4 for RK4.
    const double order = std::log2(std::abs((t1 - t2) / (t2 - t4)));
    out.push_back(within("v=" + fmt(v) + " observed order 1024/2048/4096", order, 4.0, 0.5 * scale));
  }
  return out;
}

// 4. Foucault precession is the negative of the frame angular velocity.
inline std::vector<Check> precession_equivalence(double scale) {
  using namespace detail;
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = f.space_point(Vec4(0.0, 0.5, 0.0, 0.0));
  PrecessionOptions opt;
  opt.sample_stride = 40;
  const PrecessionReport rep =
      foucault_precession(f.field(), orbit.as_worldline(), orbit.return_time(), 3960, opt);
  double worst = 0.0;
  for (std::size_t i = 0; i < rep.omega_samples.size(); ++i) {
    worst = std::max(worst, (rep.omega_samples[i].map + rep.frame_angvel_samples[i].map).norm());
  }
  return {above("samples", static_cast<double>(rep.omega_samples.size()), 99.5),
          below("max |Omega + P DU P|", worst, 1e-6 * scale),
          below("Omega0 antisymmetry residual", rep.antisymmetry_residual, 1e-6 * scale)};
}

// 5. Condition e holds for the conventional frame and fails for custom ones.
inline std::vector<Check> condition_e(double scale) {
  using namespace detail;
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  const double s_T = orbit.return_time();
  const OrientedPlane plane = orbit_plane(orbit);
  const std::size_t steps = 4096;
  std::vector<Check> out;

  const RotationComparison conv =
      compare_foucault_vs_thomas(lab_frame(ProfileKind::conventional).field(), r, s_T, steps, plane);
  out.push_back(below("conventional condition_e_residual", conv.condition_e_residual, 1e-6 * scale));
  out.push_back(within("conventional |theta_F - theta_T|", conv.foucault_angle, conv.thomas_angle, 1e-5 * scale));

  const RotationComparison fw = compare_foucault_vs_thomas(
      make_custom_frame(orbit, TransportVariant::fermi_walker).field(), r, s_T, steps, plane);
  out.push_back(below("fermi_walker frame theta_F", fw.foucault_angle, 1e-6 * scale));
  out.push_back(above("fermi_walker frame theta_T", fw.thomas_angle, 0.9));

  const LinMap4 gamma = rest_space_rotation_generator(orbit.velocity(0.0), Vec4(0.0, 0.0, 0.0, 0.5 / s_T));
  const RotationComparison bg = compare_foucault_vs_thomas(
      make_custom_frame(orbit, TransportVariant::boost, gamma).field(), r, s_T, steps, plane);
  out.push_back(within("|Gamma| s_T", generator_rate(gamma) * s_T, 0.5, 1e-12));
  out.push_back(above("boost+Gamma frame |theta_F - theta_T|", std::abs(bg.foucault_angle - bg.thomas_angle), 0.1));
  return out;
}

// 6. Transport identities and L against the flow.
inline std::vector<Check> transport_identities(double scale) {
  using namespace detail;
  std::vector<Check> out;
  const std::size_t steps = 4096;

  const RotatingFrame rot = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = rot.space_point(Vec4(0.0, 0.5, 0.0, 0.0));
  const WorldLine r = orbit.as_worldline();
  const double s_T = orbit.return_time();
  const TransportState st = integrate_lie_transport(rot.field(), r, s_T, steps);
  out.push_back(below("L(s_T) r'(0) = r'(s_T)", (st.L * r.velocity(0.0) - r.velocity(s_T)).norm(), 1e-6 * scale));
  out.push_back(below("A^-1 A = P(0)", (st.A_inv * st.A - st.P0).norm(), 1e-6 * scale));
  out.push_back(below("A A^-1 = P(s)", (st.A * st.A_inv - st.Ps).norm(), 1e-6 * scale));

  for (TransportVariant variant : {TransportVariant::boost, TransportVariant::fermi_walker}) {
    const CustomFrame cf = make_custom_frame(orbit, variant);
    const TransportState cs = integrate_lie_transport(cf.field(), r, s_T, steps);
    out.push_back(below(std::string("A(s_T) = P(s_T) H(s_T), ") + to_string(variant),
                        (cs.A - cs.Ps * cf.transport_operator(s_T)).norm(), 1e-6 * scale));
  }

  // Finite differences of the flow in 6 directions, for a rigid and a
  // non-rigid frame.
  const std::array<Vec4, 6> dirs{Vec4::Unit(0), Vec4::Unit(1), Vec4::Unit(2), Vec4::Unit(3),
                                 Vec4(0.3, 0.5, -0.7, 0.4).normalized(),
                                 Vec4(-0.2, 0.1, 0.6, -0.8).normalized()};
  for (ProfileKind kind : {ProfileKind::conventional, ProfileKind::trocheris_takeno}) {
    const RotatingFrame f = lab_frame(kind);
    const Vec4 x0(0.0, 0.5, 0.0, 0.0);
    const CircularOrbit o = f.space_point(x0);
    const double t = o.return_time();
    const LinMap4 l = integrate_lie_transport(f.field(), o.as_worldline(), t, steps).L;
    const double eps = 1e-4;
    double worst = 0.0;
    for (const Vec4& d : dirs) {
      const Vec4 fd = (integrate_flow(f.field(), x0 + eps * d, t, steps) -
                       integrate_flow(f.field(), x0 - eps * d, t, steps)) / (2.0 * eps);
      worst = std::max(worst, (fd - l * d).norm() / std::max(1.0, (l * d).norm()));
    }
    out.push_back(below(std::string(to_string(kind)) + " L vs flow differences (relative)", worst, 1e-5 * scale));
  }
  return out;
}

// 7. Conservation.
inline std::vector<Check> conservation(double scale) {
  using namespace detail;
  std::vector<Check> out;
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  const double s_T = orbit.return_time();
  const Vec4 u0 = r.velocity(0.0);
  const auto triad = rest_space_basis(u0);
  Eigen::Matrix4d tetrad;
  tetrad.col(0) = u0;
  for (int i = 0; i < 3; ++i) tetrad.col(i + 1) = triad[i];
  const LinMap4 eta = Eigen::Vector4d(-1, 1, 1, 1).asDiagonal();
  const LinMap4 gram0 = tetrad.transpose() * eta * tetrad;
  double worst = 0.0;
  relframe::fermi_walker_transport_columns<4>(r, tetrad, s_T, 4096, [&](double, const Eigen::Matrix4d& z) {
    worst = std::max(worst, (z.transpose() * eta * z - gram0).norm());
  });
  out.push_back(below("FW tetrad Gram drift over one orbit", worst, 1e-9 * scale));

  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const std::vector<GyroState> gyro =
      integrate_gyro_in_frame(f.field(), r, orbit_plane(orbit).e1, s_T, 4096);
  double drift = 0.0;
  for (const GyroState& g : gyro) drift = std::max(drift, std::abs(magnitude(*g.h0) - 1.0));
  out.push_back(below("|h0| drift, conventional frame", drift, 1e-7 * scale));

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double iso = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Vec4 x, y;
    for (int i = 0; i < 4; ++i) {
      x[i] = uni(rng);
      y[i] = uni(rng);
    }
    const LinMap4 a = wedge(x, y) + (trial % 2 ? rest_space_rotation_generator(Vec4::Unit(0), Vec4(0, uni(rng), uni(rng), uni(rng)))
                                               : LinMap4(LinMap4::Zero()));
    const double s = 20.0 * std::abs(uni(rng)) / a.norm();
    const LinMap4 e = exp_generator(a, s);
    iso = std::max(iso, (adjoint(e) * e - identity4()).norm() / std::max(1.0, e.squaredNorm()));
  }
  out.push_back(below("exp_generator isometry (relative), |sA| <= 20", iso, 1e-10 * scale));
  return out;
}

// 8. Orthogonal-time solver.
inline std::vector<Check> orthogonal_time_solver(double scale) {
  using namespace detail;
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  const double s_T = orbit.return_time();
  double worst_s = 0.0, worst_grad = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double sigma = s_T * i / 64.0;
    worst_s = std::max(worst_s, std::abs(orthogonal_time(r, r.point(sigma)) - sigma));
    if (i % 8 != 0) continue;
    const double h = 1e-4;
    Vec4 grad;
    for (int mu = 0; mu < 4; ++mu) {
      const Vec4 e = h * Vec4::Unit(mu);
      grad[mu] = (orthogonal_time(r, r.point(sigma) + e) - orthogonal_time(r, r.point(sigma) - e)) / (2.0 * h);
    }
    // ds = -dot(r', .), i.e. the covector -lower(r').
    worst_grad = std::max(worst_grad, (grad + lower(r.velocity(sigma))).norm());
  }
  return {below("|s(r(sigma)) - sigma|", worst_s, 1e-10 * scale),
          below("|grad s + r'| on the curve", worst_grad, 1e-6 * scale)};
}

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"AC1", "rigidity dichotomy", rigidity_dichotomy},
      {"AC2", "profile ODE residuals", profile_ode},
      {"AC3", "Thomas rotation 2 pi (gamma - 1) with 4th-order convergence", thomas_closed_form},
      {"AC4", "Foucault precession = -frame angular velocity", precession_equivalence},
      {"AC5", "condition e satisfied and violated", condition_e},
      {"AC6", "transport identities and flow differences", transport_identities},
      {"AC7", "conservation", conservation},
      {"AC8", "orthogonal-time solver", orthogonal_time_solver},
  };
  return all;
}

inline CriterionResult evaluate(const Criterion& c, double tolerance_scale = 1.0) {
  CriterionResult res{c.id, c.title, {}, {}};
  try {
    res.checks = c.run(tolerance_scale);
  } catch (const std::exception& e) {
    res.error = e.what();
  }
  return res;
}

// id, PASS/FAIL, measured, expected, tolerance of the decisive check.
inline void print_line(std::ostream& out, const CriterionResult& r) {
  out << r.id << ' ' << (r.pass() ? "PASS" : "FAIL");
  if (!r.error.empty()) {
    out << " error=\"" << r.error << "\"\n";
    return;
  }
  const Check* c = r.decisive();
  if (!c) {
    out << " error=\"no checks\"\n";
    return;
  }
  out << std::setprecision(12) << " measured=" << c->measured << " expected=" << c->expected;
  if (c->kind == Check::Kind::within) {
    out << " tolerance=" << c->tolerance;
  } else {
    out << " tolerance=lower-bound";
  }
  out << " check=\"" << c->what << "\" title=\"" << r.title << "\"\n";
}

}  // namespace relframe::acceptance
