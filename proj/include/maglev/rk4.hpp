#pragma once

namespace maglev {

/// One classical Runge-Kutta 4 step of size h for dx/dt = f(x).
/// Works for any state type with vector-space arithmetic (double, Eigen
/// vectors, ...).
template <class F, class X>
X rk4_step(F&& f, const X& x, double h) {
  const X k1 = f(x);
  const X k2 = f(X(x + (h / 2.0) * k1));
  const X k3 = f(X(x + (h / 2.0) * k2));
  const X k4 = f(X(x + h * k3));
  return X(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Time-aware variant for dx/dt = f(t, x), used when the derivative has an
/// explicit time dependence (exogenous disturbances).
template <class F, class X>
X rk4_step_t(F&& f, double t, const X& x, double h) {
  const X k1 = f(t, x);
  const X k2 = f(t + h / 2.0, X(x + (h / 2.0) * k1));
  const X k3 = f(t + h / 2.0, X(x + (h / 2.0) * k2));
  const X k4 = f(t + h, X(x + h * k3));
  return X(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace maglev
