#pragma once

#include <cstddef>
#include <utility>

namespace relframe::detail {

// One classical Runge-Kutta step for y' = f(t, y); Y is any Eigen dense type.
template <class Y, class F>
Y rk4_step(const F& f, double t, const Y& y, double h) {
  const Y k1 = f(t, y);
  const Y k2 = f(t + 0.5 * h, Y(y + (0.5 * h) * k1));
  const Y k3 = f(t + 0.5 * h, Y(y + (0.5 * h) * k2));
  const Y k4 = f(t + h, Y(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Fixed-step integration over [t0, t1] with `steps` steps. `observe(t, y)`
// is called at t0 and after every step.
template <class Y, class F, class Observer>
Y rk4_integrate(const F& f, double t0, double t1, Y y, std::size_t steps, Observer&& observe) {
  const double h = (t1 - t0) / static_cast<double>(steps);
  observe(t0, y);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + h * static_cast<double>(i);
    y = rk4_step(f, t, y, h);
    observe(i + 1 == steps ? t1 : t0 + h * static_cast<double>(i + 1), y);
  }
  return y;
}

template <class Y, class F>
Y rk4_integrate(const F& f, double t0, double t1, Y y, std::size_t steps) {
  return rk4_integrate(f, t0, t1, std::move(y), steps, [](double, const Y&) {});
}

}  // namespace relframe::detail
