#pragma once

#include <functional>

#include "relframe/minkowski.hpp"

namespace relframe {

// A reference frame: four-velocity field U(x) with Jacobian DU(x).
struct FrameField {
  std::function<Vec4(const Vec4&)> velocity;
  std::function<LinMap4(const Vec4&)> jacobian;
};

// Central differences with step 1e-5 (1 + |x|) and one Richardson level.
template <class Field>
LinMap4 finite_difference_jacobian(const Field& velocity, const Vec4& x) {
  const double h = 1e-5 * (1.0 + x.norm());
  auto central = [&](double step) {
    LinMap4 d;
    for (int j = 0; j < 4; ++j) {
      const Vec4 e = step * Vec4::Unit(j);
      d.col(j) = (velocity(Vec4(x + e)) - velocity(Vec4(x - e))) / (2.0 * step);
    }
    return d;
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

inline FrameField inertial_frame(const Vec4& u) {
  require_four_velocity(u, "inertial_frame: u");
  return {[u](const Vec4&) { return u; }, [](const Vec4&) { return LinMap4::Zero().eval(); }};
}

}  // namespace relframe
