#pragma once

// Scenario files and the computations behind the command-line tool.
//
// A scenario is a flat key = value file:
//
//   frame.kind = conventional      # conventional | trocheris_takeno | modified
//                                  # | constant_a | custom_boost | custom_fw
//   frame.a = 1
//   orbit.omega = 1
//   orbit.radius = 0.5
//   gamma_generator = 0, 0, 0.09   # custom frames only
//   integrator.step_count = 4096
//   tolerances.rigid = 1e-8
//   tolerances.nonrigid = 1e-3

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "relframe/error.hpp"
#include "relframe/frames.hpp"
#include "relframe/minkowski.hpp"
#include "relframe/precession.hpp"
#include "relframe/transport.hpp"
#include "relframe/worldline.hpp"

namespace relframe {

enum class FrameKind { conventional, trocheris_takeno, modified, constant_a, custom_boost, custom_fw };

inline std::string_view to_string(FrameKind k) {
  switch (k) {
    case FrameKind::conventional: return "conventional";
    case FrameKind::trocheris_takeno: return "trocheris_takeno";
    case FrameKind::modified: return "modified";
    case FrameKind::constant_a: return "constant_a";
    case FrameKind::custom_boost: return "custom_boost";
    case FrameKind::custom_fw: return "custom_fw";
  }
  return "?";
}

inline bool is_custom(FrameKind k) {
  return k == FrameKind::custom_boost || k == FrameKind::custom_fw;
}

struct Scenario {
  FrameKind frame_kind = FrameKind::conventional;
  double frame_a = 1.0;
  double omega = 1.0;
  double radius = 0.5;
  std::optional<std::array<double, 3>> gamma_generator;
  std::size_t step_count = 4096;
  double tol_rigid = 1e-8;
  double tol_nonrigid = 1e-3;

  double speed() const { return omega * radius; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": not a finite number: '" + text + "'");
  }
  return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_real(key, text);
  if (v < 0.0 || v != std::floor(v) || v > 1e9) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(v);
}

inline FrameKind parse_frame_kind(const std::string& text) {
  for (FrameKind k : {FrameKind::conventional, FrameKind::trocheris_takeno, FrameKind::modified,
                      FrameKind::constant_a, FrameKind::custom_boost, FrameKind::custom_fw}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("frame.kind: unknown frame '" + text + "'");
}

}  // namespace detail

inline void validate(const Scenario& sc) {
  if (!(sc.omega > 0.0)) throw ConfigError("orbit.omega must be positive");
  if (!(sc.radius > 0.0)) throw ConfigError("orbit.radius must be positive");
  if (!(sc.speed() < 1.0)) {
    throw ConfigError("orbit.omega * orbit.radius = " + std::to_string(sc.speed()) +
                      " must be below 1 (superluminal orbit)");
  }
  if (sc.step_count < 256) throw ConfigError("integrator.step_count must be at least 256");
  if (!(sc.tol_rigid > 0.0) || !(sc.tol_rigid < sc.tol_nonrigid)) {
    throw ConfigError("tolerances: need 0 < tolerances.rigid < tolerances.nonrigid");
  }
  if (sc.frame_kind == FrameKind::conventional) {
    if (!(sc.frame_a >= 1.0)) throw ConfigError("frame.a must be >= 1 for the conventional frame");
    if (!(sc.frame_a * sc.speed() < 1.0)) {
      throw ConfigError("frame.a * omega * radius must be below 1 for the conventional frame");
    }
  }
  if (sc.frame_kind == FrameKind::constant_a && !(sc.frame_a > 1.0)) {
    throw ConfigError("frame.a must be > 1 for the constant_a frame");
  }
  if (sc.gamma_generator && !is_custom(sc.frame_kind)) {
    throw ConfigError("gamma_generator only applies to custom_boost and custom_fw frames");
  }
}

inline Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>") {
  Scenario sc;
  std::map<std::string, std::string> seen;
  std::string line;
  int line_no = 0;
  bool has_kind = false, has_omega = false, has_radius = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
    if (seen.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    seen[key] = value;
    try {
      if (key == "frame.kind") {
        sc.frame_kind = detail::parse_frame_kind(value);
        has_kind = true;
      } else if (key == "frame.a") {
        sc.frame_a = detail::parse_real(key, value);
      } else if (key == "orbit.omega") {
        sc.omega = detail::parse_real(key, value);
        has_omega = true;
      } else if (key == "orbit.radius") {
        sc.radius = detail::parse_real(key, value);
        has_radius = true;
      } else if (key == "gamma_generator") {
        std::string v = value;
        for (char& c : v)
          if (c == ',') c = ' ';
        std::istringstream parts(v);
        std::array<double, 3> g{};
        std::string tok;
        int n = 0;
        while (parts >> tok) {
          if (n == 3) throw ConfigError("gamma_generator: expected 3 numbers");
          g[n++] = detail::parse_real(key, tok);
        }
        if (n != 3) throw ConfigError("gamma_generator: expected 3 numbers");
        sc.gamma_generator = g;
      } else if (key == "integrator.step_count") {
        sc.step_count = detail::parse_count(key, value);
      } else if (key == "tolerances.rigid") {
        sc.tol_rigid = detail::parse_real(key, value);
      } else if (key == "tolerances.nonrigid") {
        sc.tol_nonrigid = detail::parse_real(key, value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (!has_kind) throw ConfigError(source + ": missing frame.kind");
  if (!has_omega) throw ConfigError(source + ": missing orbit.omega");
  if (!has_radius) throw ConfigError(source + ": missing orbit.radius");
  validate(sc);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return parse_scenario(in, path);
}

// ---------------------------------------------------------------------------
// Frame and orbit assembled from a scenario

struct Setup {
  Scenario scenario;
  CircularOrbit orbit;
  WorldLine line;
  FrameField field;
  std::optional<RotatingFrame> rotating;
  std::optional<CustomFrame> custom;
  double s_T = 0.0;
  OrientedPlane plane;
};

inline ProfileKind profile_kind(FrameKind k) {
  switch (k) {
    case FrameKind::trocheris_takeno: return ProfileKind::trocheris_takeno;
    case FrameKind::modified: return ProfileKind::modified;
    case FrameKind::constant_a: return ProfileKind::constant_a;
    default: return ProfileKind::conventional;
  }
}

// Rotating frames rotate x -> y about the chart origin at rest; the orbit is
// the space point through (0, R, 0, 0). Custom frames are built around the
// conventional orbit of the same omega and R.
inline Setup build_setup(const Scenario& sc) {
  validate(sc);
  const Vec4 x0(0.0, sc.radius, 0.0, 0.0);
  if (is_custom(sc.frame_kind)) {
    const CircularOrbit orbit = make_lab_orbit(sc.omega, sc.radius);
    LinMap4 gamma = LinMap4::Zero();
    if (sc.gamma_generator) {
      const auto& g = *sc.gamma_generator;
      gamma = rest_space_rotation_generator(orbit.velocity(0.0), Vec4(0.0, g[0], g[1], g[2]));
    }
    const TransportVariant variant = sc.frame_kind == FrameKind::custom_boost
                                         ? TransportVariant::boost
                                         : TransportVariant::fermi_walker;
    CustomFrame frame = make_custom_frame(orbit, variant, gamma);
    FrameField field = frame.field();
    return {sc, orbit, orbit.as_worldline(), std::move(field), std::nullopt, std::move(frame),
            orbit.return_time(), orbit_plane(orbit)};
  }
  const RotatingFrame frame =
      make_lab_rotating_frame(make_rotating_profile(profile_kind(sc.frame_kind), sc.frame_a),
                              sc.omega);
  const CircularOrbit orbit = frame.space_point(x0);
  return {sc,          orbit, orbit.as_worldline(), frame.field(), frame, std::nullopt,
          orbit.return_time(), orbit_plane(orbit)};
}

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { rigid, non_rigid, inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::rigid: return "rigid";
    case Verdict::non_rigid: return "non-rigid";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct RigiditySample {
  Vec4 x;
  double k = 0.0;
  double residual = 0.0;
  std::optional<std::pair<double, double>> ode_residual;
};

struct RigidityReport {
  std::vector<RigiditySample> samples;
  double max_residual = 0.0;
  double min_residual = 0.0;
  double max_ode_residual = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

// Rotating frames: points spread over the disc of radius R (clipped to the
// profile domain) at several times and heights. Custom frames are only
// claimed rigid along their base world line, so they are sampled on it.
inline std::vector<Vec4> rigidity_sample_points(const Setup& setup, std::size_t n) {
  std::vector<Vec4> pts;
  pts.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  if (setup.custom) {
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(setup.line.point(setup.s_T * static_cast<double>(i) / static_cast<double>(n)));
    }
    return pts;
  }
  const RotatingProfile& prof = setup.rotating->profile();
  double rho_max = setup.scenario.radius;
  const double omega = setup.scenario.omega;
  if (prof.kind() == ProfileKind::conventional) {
    rho_max = std::min(rho_max, 0.95 / (prof.parameter() * omega));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double f = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double rho = rho_max * std::sqrt(f);
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(0.7 * f * setup.s_T, rho * std::cos(phi), rho * std::sin(phi),
                     0.3 * std::sin(static_cast<double>(i)));
  }
  return pts;
}

inline RigidityReport run_rigidity(const Setup& setup, std::size_t n = 50) {
  RigidityReport rep;
  rep.min_residual = std::numeric_limits<double>::infinity();
  for (const Vec4& x : rigidity_sample_points(setup, n)) {
    RigiditySample smp;
    smp.x = x;
    smp.residual = rigidity_residual(setup.field, x);
    if (setup.rotating) {
      smp.k = setup.rotating->k(x);
      if (smp.k > 0.0 && setup.rotating->profile().in_domain(smp.k)) {
        smp.ode_residual = profile_ode_residual(setup.rotating->profile(), smp.k);
        rep.max_ode_residual =
            std::max({rep.max_ode_residual, std::abs(smp.ode_residual->first),
                      std::abs(smp.ode_residual->second)});
      }
    }
    rep.max_residual = std::max(rep.max_residual, smp.residual);
    rep.min_residual = std::min(rep.min_residual, smp.residual);
    rep.samples.push_back(smp);
  }
  if (rep.max_residual < setup.scenario.tol_rigid) {
    rep.verdict = Verdict::rigid;
  } else if (rep.max_residual > setup.scenario.tol_nonrigid) {
    rep.verdict = Verdict::non_rigid;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

// Largest rigidity residual along the base world line over one return time.
inline double rigidity_along_orbit(const Setup& setup, std::size_t n = 16) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = setup.s_T * static_cast<double>(i) / static_cast<double>(n);
    m = std::max(m, rigidity_residual(setup.field, setup.line.point(s)));
  }
  return m;
}

inline ThomasRotation run_thomas(const Setup& setup) {
  return thomas_rotation(setup.line, setup.s_T, setup.scenario.step_count, setup.plane);
}

struct FoucaultResult {
  PrecessionReport report;
  double omega_plus_frame = 0.0;  // max |Omega + P DU P| over samples
  std::optional<double> angle;    // principal, at s_T
  std::optional<double> unwrapped;
  double max_h0_norm_drift = 0.0;
};

inline FoucaultResult run_foucault(const Setup& setup) {
  FoucaultResult res;
  PrecessionOptions opt;
  opt.sample_stride = std::max<std::size_t>(1, setup.scenario.step_count / 64);
  const Vec4 z0 = setup.plane.e1;
  const TransportRun run =
      frame_transport(setup.field, setup.line, setup.s_T, setup.scenario.step_count, z0);
  res.report = precession_report(setup.field, setup.line, run, opt);
  for (std::size_t i = 0; i < res.report.omega_samples.size(); ++i) {
    res.omega_plus_frame =
        std::max(res.omega_plus_frame,
                 (res.report.omega_samples[i].map + res.report.frame_angvel_samples[i].map).norm());
  }
  if (!res.report.meaningful) return res;
  AngleUnwrapper unwrap;
  for (const Vec4& h : run.h0) {
    unwrap.push(plane_angle(h, setup.plane.e1, setup.plane.e2));
    res.max_h0_norm_drift = std::max(res.max_h0_norm_drift, std::abs(magnitude(h) - 1.0));
  }
  res.angle = angle_between(z0, run.h0.back());
  res.unwrapped = std::abs(unwrap.total());
  return res;
}

struct CompareRow {
  double v = 0.0;
  double gamma = 1.0;
  RotationComparison comparison;
  double rigidity_residual = 0.0;

  std::string verdict() const { return comparison.agree() ? "agree" : "mismatch"; }
};

inline CompareRow run_compare(const Setup& setup) {
  CompareRow row;
  row.v = setup.scenario.speed();
  row.gamma = 1.0 / std::sqrt(1.0 - row.v * row.v);
  row.comparison = compare_foucault_vs_thomas(setup.field, setup.line, setup.s_T,
                                              setup.scenario.step_count, setup.plane);
  row.rigidity_residual = rigidity_along_orbit(setup);
  return row;
}

// Speeds for a sweep over v = omega * R at fixed omega.
inline std::vector<double> sweep_speeds(double from, double to, std::size_t count) {
  if (count == 0) throw ConfigError("sweep: --count must be at least 1");
  if (!(from > 0.0) || !(to < 1.0) || !(from < to)) {
    throw ConfigError("sweep: need 0 < from < to < 1");
  }
  if (count == 1) return {from};
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return v;
}

// Rows are computed concurrently and returned in parameter order.
inline std::vector<CompareRow> run_sweep(const Scenario& base, const std::vector<double>& speeds) {
  std::vector<std::future<CompareRow>> jobs;
  jobs.reserve(speeds.size());
  for (double v : speeds) {
    Scenario sc = base;
    sc.radius = v / base.omega;
    validate(sc);
    jobs.push_back(std::async(std::launch::async, [sc] { return run_compare(build_setup(sc)); }));
  }
  std::vector<CompareRow> rows;
  rows.reserve(jobs.size());
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCompareCsvHeader =
    "v,gamma,s_T,thomas_angle_unwrapped,foucault_angle_unwrapped,rigidity_residual,"
    "condition_e_residual,verdict";

inline std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

inline std::string csv_row(const CompareRow& r) {
  const RotationComparison& c = r.comparison;
  return format_real(r.v) + "," + format_real(r.gamma) + "," + format_real(c.s_T) + "," +
         format_real(c.thomas_unwrapped) + "," + format_real(c.foucault_unwrapped) + "," +
         format_real(r.rigidity_residual) + "," + format_real(c.condition_e_residual) + "," +
         r.verdict();
}

inline void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << kCompareCsvHeader << '\n';
  for (const CompareRow& r : rows) out << csv_row(r) << '\n';
}

inline constexpr const char* kThomasCsvHeader =
    "v,gamma,s_T,thomas_angle,thomas_angle_unwrapped,retrograde";

inline std::string csv_row(const Scenario& sc, const ThomasRotation& t) {
  const double v = sc.speed();
  return format_real(v) + "," + format_real(1.0 / std::sqrt(1.0 - v * v)) + "," +
         format_real(t.s_T) + "," + format_real(t.angle) + "," + format_real(t.unwrapped) + "," +
         (t.retrograde ? "true" : "false");
}

}  // namespace relframe
