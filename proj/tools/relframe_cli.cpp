// relframe: rigidity, Thomas rotation and Foucault precession reports for
// rotating reference frames described by scenario files.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "relframe/acceptance.hpp"
#include "relframe/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconclusive = 2;
constexpr int kExitRefused = 3;
constexpr int kExitUsage = 64;

using namespace relframe;

struct Common {
  std::string scenario;
  std::string csv;
  std::size_t steps = 0;
};

Scenario load(const Common& c) {
  Scenario sc = load_scenario(c.scenario);
  if (c.steps != 0) {
    sc.step_count = c.steps;
    validate(sc);
  }
  return sc;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write CSV file '" + path + "'");
  return out;
}

std::ostream& vec(std::ostream& os, const Vec4& v) {
  return os << '(' << format_real(v[0]) << ", " << format_real(v[1]) << ", " << format_real(v[2])
            << ", " << format_real(v[3]) << ')';
}

void print_header(const Setup& s) {
  const Scenario& sc = s.scenario;
  std::cout << "frame: " << to_string(sc.frame_kind) << "\n"
            << "omega: " << format_real(sc.omega) << "  radius: " << format_real(sc.radius)
            << "  v: " << format_real(sc.speed()) << "\n"
            << "return time s_T: " << format_real(s.s_T) << "\n";
}

int cmd_rigidity(const Common& c) {
  const Setup setup = build_setup(load(c));
  print_header(setup);
  const RigidityReport rep = run_rigidity(setup);
  std::cout << "sampled points: " << rep.samples.size()
            << (setup.custom ? " (on the base world line)" : "") << "\n"
            << "rigidity residual: max " << format_real(rep.max_residual) << "  min "
            << format_real(rep.min_residual) << "\n";
  if (setup.rotating) {
    std::cout << "profile ODE residual (max |.| over samples): "
              << format_real(rep.max_ode_residual) << "\n";
  }
  std::cout << "tolerances: rigid < " << format_real(setup.scenario.tol_rigid)
            << ", non-rigid > " << format_real(setup.scenario.tol_nonrigid) << "\n"
            << "verdict: " << to_string(rep.verdict) << "\n";
  return rep.verdict == Verdict::inconclusive ? kExitInconclusive : kExitOk;
}

int cmd_thomas(const Common& c) {
  const Setup setup = build_setup(load(c));
  print_header(setup);
  const ThomasRotation t = run_thomas(setup);
  std::cout << "thomas angle (principal): " << format_real(t.angle) << "\n"
            << "thomas angle (unwrapped): " << format_real(t.unwrapped) << "\n";
  if (t.has_axis) {
    std::cout << "axis: ";
    vec(std::cout, t.axis) << "\n";
  } else {
    std::cout << "axis: undetermined\n";
  }
  std::cout << "retrograde: " << (t.retrograde ? "true" : "false") << "\n";
  if (!c.csv.empty()) {
    std::ofstream out = open_csv(c.csv);
    out << kThomasCsvHeader << '\n' << csv_row(setup.scenario, t) << '\n';
  }
  return kExitOk;
}

int cmd_foucault(const Common& c) {
  const Setup setup = build_setup(load(c));
  print_header(setup);
  const FoucaultResult f = run_foucault(setup);
  std::cout << "Omega0 antisymmetry residual: " << format_real(f.report.antisymmetry_residual) << "\n"
            << "meaningful: " << (f.report.meaningful ? "true" : "false") << "\n";
  if (!f.report.meaningful) {
    std::cerr << "relframe: Foucault precession is not meaningful: the frame is not rigid along "
                 "this space point\n";
    return kExitRefused;
  }
  std::cout << "max |Omega + frame angular velocity|: " << format_real(f.omega_plus_frame) << "\n"
            << "foucault angle at s_T (principal): " << format_real(*f.angle) << "\n"
            << "foucault angle at s_T (unwrapped): " << format_real(*f.unwrapped) << "\n"
            << "max ||h0| - 1|: " << format_real(f.max_h0_norm_drift) << "\n";
  return kExitOk;
}

int cmd_compare(const Common& c) {
  const Setup setup = build_setup(load(c));
  print_header(setup);
  const CompareRow row = run_compare(setup);
  const RotationComparison& r = row.comparison;
  std::cout << "thomas angle: principal " << format_real(r.thomas_angle) << ", unwrapped "
            << format_real(r.thomas_unwrapped) << "\n"
            << "foucault angle: principal " << format_real(r.foucault_angle) << ", unwrapped "
            << format_real(r.foucault_unwrapped) << "\n"
            << "condition e residual |A(s_T) - N P(0)|: " << format_real(r.condition_e_residual)
            << "\n"
            << "verdict: " << row.verdict() << "\n";
  if (!c.csv.empty()) {
    std::ofstream out = open_csv(c.csv);
    write_compare_csv(out, {row});
  }
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& param, double from, double to, std::size_t count) {
  if (param != "v") throw ConfigError("sweep: only --param v is supported");
  const Scenario base = load(c);
  const std::vector<CompareRow> rows = run_sweep(base, sweep_speeds(from, to, count));
  if (c.csv.empty()) {
    write_compare_csv(std::cout, rows);
  } else {
    std::ofstream out = open_csv(c.csv);
    write_compare_csv(out, rows);
  }
  return kExitOk;
}

int cmd_selfcheck(bool list, double tolerance_scale) {
  if (list) {
    for (const auto& c : acceptance::criteria()) std::cout << c.id << ' ' << c.title << "\n";
    return kExitOk;
  }
  bool ok = true;
  for (const auto& c : acceptance::criteria()) {
    const acceptance::CriterionResult r = acceptance::evaluate(c, tolerance_scale);
    acceptance::print_line(std::cout, r);
    ok = ok && r.pass();
  }
  return ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigidity, Thomas rotation and Foucault precession for rotating frames"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool csv) {
    sub->add_option("--scenario", common.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--steps", common.steps, "Integrator steps per orbit (overrides the scenario)");
    if (csv) sub->add_option("--csv", common.csv, "Write CSV output to this path");
  };

  CLI::App* rigidity = app.add_subcommand("rigidity", "Rigidity residuals and verdict");
  add_common(rigidity, false);
  CLI::App* thomas = app.add_subcommand("thomas", "Thomas rotation over one return time");
  add_common(thomas, true);
  CLI::App* foucault = app.add_subcommand("foucault", "Foucault precession along the orbit");
  add_common(foucault, false);
  CLI::App* compare = app.add_subcommand("compare", "Foucault angle against Thomas angle");
  add_common(compare, true);

  CLI::App* sweep = app.add_subcommand("sweep", "Compare over a range of speeds, CSV output");
  add_common(sweep, true);
  std::string param = "v";
  double from = 0.0, to = 0.0;
  std::size_t count = 0;
  sweep->add_option("--param", param, "Swept parameter (v = omega * radius)");
  sweep->add_option("--from", from, "First value")->required();
  sweep->add_option("--to", to, "Last value")->required();
  sweep->add_option("--count", count, "Number of rows")->required();

  CLI::App* selfcheck = app.add_subcommand("selfcheck", "Run the acceptance criteria");
  bool list = false;
  double tolerance_scale = 1.0;
  selfcheck->add_flag("--list", list, "Print criterion ids without running");
  selfcheck->add_option("--tolerance-scale", tolerance_scale, "Multiply every tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*rigidity) return cmd_rigidity(common);
    if (*thomas) return cmd_thomas(common);
    if (*foucault) return cmd_foucault(common);
    if (*compare) return cmd_compare(common);
    if (*sweep) return cmd_sweep(common, param, from, to, count);
    if (*selfcheck) return cmd_selfcheck(list, tolerance_scale);
  } catch (const ConfigError& e) {
    std::cerr << "relframe: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "relframe: refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const DomainError& e) {
    std::cerr << "relframe: refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const ConvergenceError& e) {
    std::cerr << "relframe: inconclusive: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "relframe: error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
