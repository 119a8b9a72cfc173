#include <gtest/gtest.h>

#include <numbers>

#include "relframe/frames.hpp"
#include "relframe/precession.hpp"
#include "relframe/transport.hpp"
#include "support.hpp"

using namespace relframe;
using relframe::testing::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

RotatingFrame lab_frame(ProfileKind kind, double a = 1.0) {
  return make_lab_rotating_frame(make_rotating_profile(kind, a), 1.0);
}

double thomas_closed_form(double v) {
  const double g = 1.0 / std::sqrt(1.0 - v * v);
  return 2 * kPi * (g - 1);
}

double principal(double angle) {
  const double m = std::fmod(angle, 2 * kPi);
  return m > kPi ? 2 * kPi - m : m;
}

}  // namespace

TEST(Foucault, InertialFrameHasNoPrecession) {
  const Vec4 u(1.25, 0, 0.75, 0);
  WorldLine r;
  r.point = [u](double s) { return Vec4(s * u); };
  r.velocity = [u](double) { return u; };
  r.acceleration = [](double) { return Vec4::Zero().eval(); };
  const Vec4 z0 = projector(u) * Vec4(0, 1, 1, 0);
  const PrecessionReport rep = foucault_precession(inertial_frame(u), r, 5.0, 100);
  EXPECT_TRUE(rep.meaningful);
  for (const TimedMap& m : rep.omega0_samples) EXPECT_LT(m.map.norm(), 1e-15);
  for (const GyroState& g : integrate_gyro_in_frame(inertial_frame(u), r, z0, 5.0, 100)) {
    EXPECT_LT((*g.h0 - z0).norm(), 1e-14);
  }
}

TEST(Foucault, ConventionalFrameIsMeaningfulAndOpposesAngularVelocity) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  PrecessionOptions opt;
  opt.sample_stride = 256;
  const PrecessionReport rep = foucault_precession(f.field(), orbit.as_worldline(), orbit.return_time(), 4096, opt);
  EXPECT_TRUE(rep.meaningful);
  EXPECT_LT(rep.antisymmetry_residual, 1e-9);
  ASSERT_EQ(rep.omega_samples.size(), rep.frame_angvel_samples.size());
  for (std::size_t i = 0; i < rep.omega_samples.size(); ++i) {
    const LinMap4& w = rep.frame_angvel_samples[i].map;
    EXPECT_GT(w.norm(), 0.1);
    EXPECT_LT((rep.omega_samples[i].map + w).norm(), 1e-9);
  }
}

TEST(Foucault, TrocherisTakenoIsNotMeaningful) {
  const RotatingFrame f = lab_frame(ProfileKind::trocheris_takeno);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  const WorldLine r = orbit.as_worldline();
  const PrecessionReport rep = foucault_precession(f.field(), r, orbit.return_time(), 4096);
  EXPECT_FALSE(rep.meaningful);
  EXPECT_GT(rep.antisymmetry_residual, 1e-3);
  EXPECT_THROW(integrate_gyro_in_frame(f.field(), r, orbit_plane(orbit).e1, orbit.return_time(), 4096),
               PreconditionError);
  EXPECT_THROW(compare_foucault_vs_thomas(f.field(), r, orbit.return_time(), 4096, orbit_plane(orbit)),
               PreconditionError);
}

TEST(Foucault, OmegaEqualsMinusAngularVelocityAcrossRigidFramesProperty) {
  Gen g(51);
  for (int k = 0; k < 3; ++k) {
    const double omega = g.uniform(0.5, 2.0);
    const CircularOrbit orbit = make_lab_orbit(omega, g.uniform(0.1, 0.8) / omega);
    const WorldLine r = orbit.as_worldline();
    const LinMap4 gamma = rest_space_rotation_generator(r.velocity(0.0), 0.2 * g.spatial());
    std::vector<FrameField> fields{make_custom_frame(orbit, TransportVariant::boost).field(),
                                   make_custom_frame(orbit, TransportVariant::fermi_walker).field(),
                                   make_custom_frame(orbit, TransportVariant::boost, gamma).field()};
    for (const FrameField& f : fields) {
      PrecessionOptions opt;
      opt.sample_stride = 128;
      const PrecessionReport rep = foucault_precession(f, r, 3.0, 1024, opt);
      EXPECT_TRUE(rep.meaningful);
      for (std::size_t i = 0; i < rep.omega_samples.size(); ++i) {
        EXPECT_LT((rep.omega_samples[i].map + rep.frame_angvel_samples[i].map).norm(), 1e-5);
      }
    }
  }
}

TEST(Foucault, GyroInFrameMatchesTwoRoutes) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  const WorldLine r = orbit.as_worldline();
  const double s_T = orbit.return_time();
  const Vec4 z0 = orbit_plane(orbit).e2;
  const TransportRun run = frame_transport(f.field(), r, s_T, 2048, z0);
  const std::vector<GyroState> fw = fermi_walker_trajectory(r, z0, s_T, 2048);
  ASSERT_EQ(run.h0.size(), fw.size());
  double worst = 0.0, length = 0.0;
  for (std::size_t i = 0; i < fw.size(); ++i) {
    worst = std::max(worst, (run.h0[i] - run.states[i].A_inv * fw[i].z).norm());
    length = std::max(length, std::abs(magnitude(run.h0[i]) - 1.0));
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_LT(length, 1e-9);
}

TEST(Foucault, GyroInFrameRejectsNonOrthogonalStart) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  EXPECT_THROW(integrate_gyro_in_frame(f.field(), orbit.as_worldline(), Vec4(0, 0, 0.5, 1), 1.0, 256),
               PreconditionError);
}

TEST(Foucault, ResidualNormalization) {
  EXPECT_EQ(relative_antisymmetry_residual(LinMap4::Zero()), 0.0);
  const LinMap4 sym = Vec4(0, 1, 0, 0) * Vec4(0, 1, 0, 0).transpose();
  EXPECT_NEAR(relative_antisymmetry_residual(sym), 1.0, 1e-15);
  EXPECT_NEAR(relative_antisymmetry_residual(1e-3 * sym, 1.0), 1e-3, 1e-15);
  EXPECT_NEAR(relative_antisymmetry_residual(wedge(Vec4::Unit(1), Vec4::Unit(2))), 0.0, 1e-15);
}

TEST(Thomas, InertialLineHasNoRotation) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 1e-9);
  const ThomasRotation t = thomas_rotation(orbit, 512);
  EXPECT_LT(t.angle, 1e-12);
  EXPECT_LT(t.unwrapped, 1e-12);
}

TEST(Thomas, ClosedFormAtSeveralSpeeds) {
  for (double v : {0.1, 0.3, 0.5, 0.7}) {
    const ThomasRotation t = thomas_rotation(make_lab_orbit(1.0, v), 4096);
    EXPECT_NEAR(t.unwrapped, thomas_closed_form(v), 1e-9 * std::max(1.0, thomas_closed_form(v))) << v;
    EXPECT_NEAR(t.angle, principal(thomas_closed_form(v)), 1e-9) << v;
    EXPECT_TRUE(t.retrograde);
  }
  EXPECT_NEAR(thomas_closed_form(0.3), 0.3033826, 1e-7);
  EXPECT_NEAR(thomas_rotation(make_lab_orbit(1.0, 0.5), 4096).unwrapped, 0.9720121497572858, 1e-9);
}

TEST(Thomas, UnwrapsBeyondPi) {
  const ThomasRotation t = thomas_rotation(make_lab_orbit(1.0, 0.8), 8192);
  EXPECT_NEAR(t.unwrapped, 4 * kPi / 3, 1e-8);
  EXPECT_NEAR(t.unwrapped, 4.18879, 1e-5);
  EXPECT_NEAR(t.angle, 2 * kPi / 3, 1e-8);
  EXPECT_NEAR(t.angle, 2.0944, 1e-4);
}

TEST(Thomas, AxisIsOrbitNormal) {
  const ThomasRotation t = thomas_rotation(make_lab_orbit(1.0, 0.5), 4096);
  ASSERT_TRUE(t.has_axis);
  EXPECT_NEAR(std::abs(t.axis[3]), 1.0, 1e-9);
  EXPECT_LT(relframe::testing::isometry_residual(t.rotation), 1e-9);
}

TEST(Thomas, IndependentOfTriadProperty) {
  Gen g(52);
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.6);
  const WorldLine r = orbit.as_worldline();
  const double ref = thomas_rotation(orbit, 4096).angle;
  for (int i = 0; i < 5; ++i) {
    const ThomasRotation t =
        thomas_rotation(r, orbit.return_time(), 4096, orbit_plane(orbit), g.triad(r.velocity(0.0)));
    EXPECT_NEAR(t.angle, ref, 1e-9);
  }
}

TEST(Thomas, TiltedMovingOrbitProperty) {
  Gen g(53);
  for (int i = 0; i < 3; ++i) {
    const Vec4 u = g.four_velocity(0.5);
    const auto t = g.triad(u);
    const double v = g.uniform(0.2, 0.7);
    const CircularOrbit orbit = make_circular_orbit(g.vector(), u, {t[0], t[1]}, 1.0, v);
    EXPECT_NEAR(thomas_rotation(orbit, 4096).unwrapped, thomas_closed_form(v), 1e-8);
  }
}

TEST(Thomas, RequiresReturnOfVelocity) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  EXPECT_THROW(thomas_rotation(orbit.as_worldline(), 0.5 * orbit.return_time(), 1024, orbit_plane(orbit)),
               PreconditionError);
}

TEST(Thomas, RejectsNonOrthonormalTriad) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const std::array<Vec4, 3> bad{Vec4::Unit(1), Vec4::Unit(2), Vec4::Unit(3)};
  EXPECT_THROW(thomas_rotation(orbit.as_worldline(), orbit.return_time(), 1024, orbit_plane(orbit), bad),
               PreconditionError);
}

TEST(Compare, ConventionalFrameAgrees) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const RotationComparison c = compare_foucault_vs_thomas(
      lab_frame(ProfileKind::conventional).field(), orbit.as_worldline(), orbit.return_time(), 4096,
      orbit_plane(orbit));
  EXPECT_TRUE(c.agree());
  EXPECT_LT(c.condition_e_residual, 1e-8);
  EXPECT_NEAR(c.thomas_angle, 0.9720121497572858, 1e-9);
  // Followed continuously, the frame-relative angle winds once more.
  EXPECT_NEAR(c.foucault_unwrapped - c.thomas_unwrapped, 2 * kPi, 1e-6);
}

TEST(Compare, FermiWalkerFrameSeesNoPrecession) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const RotationComparison c = compare_foucault_vs_thomas(
      make_custom_frame(orbit, TransportVariant::fermi_walker).field(), orbit.as_worldline(),
      orbit.return_time(), 4096, orbit_plane(orbit));
  EXPECT_FALSE(c.agree());
  EXPECT_LT(c.foucault_angle, 1e-8);
  EXPECT_LT(c.foucault_unwrapped, 1e-8);
  EXPECT_GT(c.condition_e_residual, 0.5);
}

TEST(Compare, BoostFrameWithoutGeneratorSatisfiesConditionE) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const RotationComparison c = compare_foucault_vs_thomas(
      make_custom_frame(orbit, TransportVariant::boost).field(), orbit.as_worldline(),
      orbit.return_time(), 4096, orbit_plane(orbit));
  EXPECT_LT(c.condition_e_residual, 1e-8);
  EXPECT_TRUE(c.agree());
}

TEST(Compare, FoucaultAngleDependsOnGenerator) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  const double s_T = orbit.return_time();
  std::vector<double> angles;
  for (double rate : {0.1, 0.3, 0.6}) {
    const LinMap4 gamma = rest_space_rotation_generator(r.velocity(0.0), Vec4(0, 0, 0, rate / s_T));
    const RotationComparison c = compare_foucault_vs_thomas(
        make_custom_frame(orbit, TransportVariant::boost, gamma).field(), r, s_T, 4096, orbit_plane(orbit));
    EXPECT_NEAR(c.thomas_angle, 0.9720121497572858, 1e-9);
    EXPECT_GT(c.condition_e_residual, 1e-3);
    angles.push_back(c.foucault_angle);
  }
  EXPECT_GT(std::abs(angles[0] - angles[1]), 0.1);
  EXPECT_GT(std::abs(angles[1] - angles[2]), 0.1);
}

TEST(Demo, FramesAroundOneWorldLineDisagree) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const LinMap4 gamma = rest_space_rotation_generator(orbit.velocity(0.0), Vec4(0, 0, 0, 0.2));
  const auto demo = worldline_angular_velocity_demo(orbit, gamma, orbit.return_time() / 4);
  ASSERT_EQ(demo.frames.size(), 4u);
  EXPECT_GT(demo.min_pairwise_difference, 1e-3);
  EXPECT_EQ(demo.frames.front().label, "fermi_walker");
  EXPECT_LT(demo.frames.front().rate, 1e-12);
}

TEST(Demo, SkipsConventionalFrameForOtherOrbits) {
  // Proper time with b = 1 needs a^2 = 1 + v^2.
  const CircularOrbit orbit(Vec4::Zero(), Vec4::Unit(0), wedge(Vec4::Unit(2), Vec4::Unit(1)),
                            0.5 * Vec4::Unit(1), std::sqrt(1.25), 1.0);
  const auto demo = worldline_angular_velocity_demo(orbit, LinMap4::Zero(), 1.0);
  EXPECT_EQ(demo.frames.size(), 3u);
}
