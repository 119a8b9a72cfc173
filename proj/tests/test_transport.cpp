#include <gtest/gtest.h>

#include <numbers>

#include "relframe/frames.hpp"
#include "relframe/precession.hpp"
#include "relframe/transport.hpp"
#include "support.hpp"

using namespace relframe;
using relframe::testing::Gen;

namespace {

RotatingFrame lab_frame(ProfileKind kind, double a = 1.0) {
  return make_lab_rotating_frame(make_rotating_profile(kind, a), 1.0);
}

WorldLine inertial_line(const Vec4& u, const Vec4& x0) {
  WorldLine w;
  w.point = [u, x0](double s) { return Vec4(x0 + s * u); };
  w.velocity = [u](double) { return u; };
  w.acceleration = [](double) { return Vec4::Zero().eval(); };
  return w;
}

// Pairwise dots of A applied to an orthonormal triad of E_{r'(0)}.
double isometry_defect(const TransportState& st, const Vec4& u0) {
  const auto t = rest_space_basis(u0);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      worst = std::max(worst, std::abs(dot(st.A * t[i], st.A * t[j]) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace

TEST(LieTransport, InertialFrameIsIdentity) {
  const Vec4 u(1.25, 0.75, 0, 0);
  const WorldLine r = inertial_line(u, Vec4(0, 1, 2, 3));
  const TransportState st = integrate_lie_transport(inertial_frame(u), r, 7.0, 256);
  EXPECT_LT((st.L - identity4()).norm(), 1e-15);
  EXPECT_LT((st.A - projector(u)).norm(), 1e-14);
}

TEST(LieTransport, CarriesInitialVelocityToCurrentVelocity) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  const WorldLine r = orbit.as_worldline();
  const TransportRun run = frame_transport(f.field(), r, orbit.return_time(), 2048);
  for (std::size_t i = 0; i < run.states.size(); i += 128) {
    const TransportState& st = run.states[i];
    EXPECT_LT((st.L * r.velocity(0.0) - r.velocity(st.s)).norm(), 1e-8);
  }
}

TEST(LieTransport, InverseIdentitiesAfterOneOrbit) {
  for (ProfileKind kind : {ProfileKind::conventional, ProfileKind::trocheris_takeno}) {
    const RotatingFrame f = lab_frame(kind);
    const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
    const TransportState st = integrate_lie_transport(f.field(), orbit.as_worldline(), orbit.return_time(), 4096);
    EXPECT_LT((st.A_inv * st.A - st.P0).norm(), 1e-7);
    EXPECT_LT((st.A * st.A_inv - st.Ps).norm(), 1e-7);
  }
}

TEST(LieTransport, RigidFramesTransportIsometrically) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  const WorldLine r = orbit.as_worldline();
  const TransportRun run = frame_transport(f.field(), r, orbit.return_time(), 2048);
  for (std::size_t i = 0; i < run.states.size(); i += 256) {
    EXPECT_LT(isometry_defect(run.states[i], r.velocity(0.0)), 1e-7);
  }
  EXPECT_LT(isometry_defect(run.states.back(), r.velocity(0.0)), 1e-7);
}

TEST(LieTransport, TrocherisTakenoIsNotIsometric) {
  const RotatingFrame f = lab_frame(ProfileKind::trocheris_takeno);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  const WorldLine r = orbit.as_worldline();
  const TransportState st = integrate_lie_transport(f.field(), r, orbit.return_time(), 4096);
  EXPECT_GT(isometry_defect(st, r.velocity(0.0)), 1e-2);
}

TEST(LieTransport, CustomFrameMatchesTransportFamily) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  const LinMap4 gamma = rest_space_rotation_generator(r.velocity(0.0), Vec4(0, 0.05, 0.0, 0.1));
  for (TransportVariant v : {TransportVariant::boost, TransportVariant::fermi_walker}) {
    for (const LinMap4& g : {LinMap4(LinMap4::Zero()), gamma}) {
      const CustomFrame f = make_custom_frame(orbit, v, g);
      const TransportRun run = frame_transport(f.field(), r, 3.0, 1024);
      for (std::size_t i = 0; i < run.states.size(); i += 256) {
        const TransportState& st = run.states[i];
        EXPECT_LT((st.A - st.Ps * f.transport_operator(st.s)).norm(), 1e-6);
        EXPECT_LT((st.A - f.transport_operator(st.s) * st.P0).norm(), 1e-6);
      }
    }
  }
}

TEST(LieTransport, AnalyticADotMatchesDifferences) {
  const RotatingFrame f = lab_frame(ProfileKind::trocheris_takeno);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  const TransportRun run = frame_transport(f.field(), orbit.as_worldline(), 2.0, 2000);
  for (std::size_t i = 100; i < 2000; i += 300) {
    const double h = run.states[i + 1].s - run.states[i].s;
    const LinMap4 fd = (run.states[i + 1].A - run.states[i - 1].A) / (2 * h);
    EXPECT_LT((fd - run.states[i].A_dot).norm(), 1e-5);
  }
}

TEST(LieTransport, MatchesFlowDifferencesInSixDirections) {
  const std::vector<Vec4> dirs{Vec4::Unit(0), Vec4::Unit(1), Vec4::Unit(2), Vec4::Unit(3),
                               Vec4(1, 1, 0, 0).normalized(), Vec4(0, 1, -1, 1).normalized()};
  for (ProfileKind kind : {ProfileKind::conventional, ProfileKind::modified}) {
    const RotatingFrame f = lab_frame(kind);
    const Vec4 x0(0, 0.5, 0, 0);
    const CircularOrbit orbit = f.space_point(x0);
    const double t = 0.6 * orbit.return_time();
    const LinMap4 l = integrate_lie_transport(f.field(), orbit.as_worldline(), t, 2048).L;
    for (const Vec4& d : dirs) {
      const double eps = 1e-4;
      const Vec4 fd = (integrate_flow(f.field(), x0 + eps * d, t, 2048) -
                       integrate_flow(f.field(), x0 - eps * d, t, 2048)) / (2 * eps);
      EXPECT_LT((fd - l * d).norm() / std::max(1.0, (l * d).norm()), 1e-5) << to_string(kind);
    }
  }
}

TEST(LieTransport, RejectsCurvesThatAreNotIntegralCurves) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit other = make_lab_orbit(0.5, 0.5);
  EXPECT_THROW(integrate_lie_transport(f.field(), other.as_worldline(), 1.0, 512), PreconditionError);
}

TEST(LieTransport, CoarseStepsAreRejectedByHalving) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const CircularOrbit orbit = f.space_point(Vec4(0, 0.5, 0, 0));
  EXPECT_THROW(integrate_lie_transport(f.field(), orbit.as_worldline(), orbit.return_time(), 16),
               ConvergenceError);
  TransportOptions lax;
  lax.check_halving = false;
  EXPECT_NO_THROW(integrate_lie_transport(f.field(), orbit.as_worldline(), orbit.return_time(), 16, lax));
}

TEST(Flow, InertialFrameTranslates) {
  const Vec4 u(1.25, 0, 0.75, 0);
  const Vec4 x(0.3, 1, 2, 3);
  EXPECT_LT((integrate_flow(inertial_frame(u), x, 2.5, 10) - (x + 2.5 * u)).norm(), 1e-14);
}

TEST(Flow, RotatingFrameFollowsCircularOrbit) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const Vec4 x0(0, 0.5, 0, 0);
  const CircularOrbit orbit = f.space_point(x0);
  for (double t : {1.0, 4.0}) {
    EXPECT_LT((integrate_flow(f.field(), x0, t, 4096) - orbit.point(t)).norm(), 1e-8);
  }
}

TEST(Flow, SemigroupProperty) {
  Gen g(41);
  const RotatingFrame f = lab_frame(ProfileKind::trocheris_takeno);
  for (int i = 0; i < 5; ++i) {
    const Vec4 x = Vec4(0, 0, 0, 0.1) + g.spatial(0.4);
    const double t1 = g.uniform(0.2, 2.0), t2 = g.uniform(0.2, 2.0);
    const Vec4 two = integrate_flow(f.field(), integrate_flow(f.field(), x, t1, 2000), t2, 2000);
    const Vec4 one = integrate_flow(f.field(), x, t1 + t2, 4000);
    EXPECT_LT((two - one).norm(), 1e-8);
  }
}

TEST(Flow, FourthOrderConvergence) {
  const RotatingFrame f = lab_frame(ProfileKind::conventional);
  const Vec4 x0(0, 0.6, 0, 0);
  const CircularOrbit orbit = f.space_point(x0);
  const double t = 5.0;
  const double e1 = (integrate_flow(f.field(), x0, t, 64) - orbit.point(t)).norm();
  const double e2 = (integrate_flow(f.field(), x0, t, 128) - orbit.point(t)).norm();
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
}

TEST(FermiWalker, InertialLineKeepsVector) {
  const Vec4 u(1.25, 0.75, 0, 0);
  const Vec4 z0(0, 0, 1, 0);
  const GyroState st = fermi_walker_transport(inertial_line(u, Vec4::Zero()), z0, 10.0, 100);
  EXPECT_LT((st.z - z0).norm(), 1e-15);
}

TEST(FermiWalker, RejectsNonOrthogonalStart) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  EXPECT_THROW(fermi_walker_transport(orbit.as_worldline(), Vec4(0, 0, 1, 0), 1.0, 100), PreconditionError);
}

TEST(FermiWalker, RadialVectorAfterOneOrbit) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  const Vec4 z0 = Vec4::Unit(1);
  const GyroState st = fermi_walker_transport(r, z0, orbit.return_time(), 4096);
  EXPECT_NEAR(angle_between(z0, st.z), 0.9720121497572858, 1e-9);
  // Retrograde: against the x -> y sense of the orbit.
  EXPECT_LT(st.z[2], 0.0);
}

TEST(FermiWalker, TetradConservationAlongOrbitProperty) {
  Gen g(42);
  const CircularOrbit orbit = make_lab_orbit(1.3, 0.6);
  const WorldLine r = orbit.as_worldline();
  const Vec4 u0 = r.velocity(0.0);
  for (int k = 0; k < 3; ++k) {
    const auto t = g.triad(u0);
    Eigen::Matrix4d z0;
    z0 << u0, t[0], t[1], t[2];
    const LinMap4 eta = Eigen::Vector4d(-1, 1, 1, 1).asDiagonal();
    const LinMap4 gram = z0.transpose() * eta * z0;
    double worst = 0.0, orth = 0.0;
    fermi_walker_transport_columns<4>(r, z0, orbit.return_time(), 2048, [&](double s, const Eigen::Matrix4d& z) {
      worst = std::max(worst, (z.transpose() * eta * z - gram).norm());
      for (int i = 1; i < 4; ++i) orth = std::max(orth, std::abs(dot(z.col(i), r.velocity(s))));
      // The first column follows r'(s).
      orth = std::max(orth, (z.col(0) - r.velocity(s)).norm());
    });
    EXPECT_LT(worst, 1e-9);
    EXPECT_LT(orth, 1e-9);
  }
}

TEST(FermiWalker, FourthOrderConvergence) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.7);
  const WorldLine r = orbit.as_worldline();
  const Vec4 exact = fermi_walker_operator(orbit, 3.0) * Vec4::Unit(1);
  const double e1 = (fermi_walker_transport(r, Vec4::Unit(1), 3.0, 32).z - exact).norm();
  const double e2 = (fermi_walker_transport(r, Vec4::Unit(1), 3.0, 64).z - exact).norm();
  EXPECT_NEAR(std::log2(e1 / e2), 4.0, 0.3);
}

TEST(TransportOperator, StartsAtIdentity) {
  const WorldLine r = make_lab_orbit(1.0, 0.5).as_worldline();
  for (TransportVariant v : {TransportVariant::boost, TransportVariant::fermi_walker}) {
    EXPECT_LT((transport_operator_H(r, v, 0.0) - identity4()).norm(), 1e-15);
  }
}

TEST(TransportOperator, CarriesVelocityAndIsIsometricProperty) {
  Gen g(43);
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  for (TransportVariant v : {TransportVariant::boost, TransportVariant::fermi_walker}) {
    for (int i = 0; i < 5; ++i) {
      const double s = g.uniform(0.0, 6.0);
      const LinMap4 h = transport_operator_H(r, v, s);
      EXPECT_LT((h * r.velocity(0.0) - r.velocity(s)).norm(), 1e-9);
      EXPECT_LT(relframe::testing::isometry_residual(h), 1e-10);
    }
  }
}

TEST(TransportOperator, ClosedFormFermiWalkerMatchesIntegration) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  for (double s : {0.4, 2.5, 5.0}) {
    EXPECT_LT((fermi_walker_operator(orbit, s) - transport_operator_H(orbit.as_worldline(),
                                                                      TransportVariant::fermi_walker, s))
                  .norm(),
              1e-11);
  }
}

TEST(TransportOperator, VariantsDifferByTheThomasRotationAtReturn) {
  const CircularOrbit orbit = make_lab_orbit(1.0, 0.5);
  const WorldLine r = orbit.as_worldline();
  const double s_T = orbit.return_time();
  const LinMap4 hb = transport_operator_H(r, TransportVariant::boost, s_T);
  const LinMap4 hf = transport_operator_H(r, TransportVariant::fermi_walker, s_T);
  EXPECT_LT((hb - identity4()).norm(), 1e-12);
  const RotationAngle ra = rotation_angle(adjoint(hb) * hf, r.velocity(0.0));
  EXPECT_NEAR(ra.angle, thomas_rotation(orbit, 4096).angle, 1e-9);
}
