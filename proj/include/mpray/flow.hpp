#pragma once

// The MP-geodesic flow on a system (g, alpha, U): trajectories of
//   x' = v,   (v')^i = -Gamma^i_{jk} v^j v^k + (Yv)^i - (grad U)^i,
// which conserve the energy E = |v|_g^2/2 + U.  Rays start at the boundary
// (or inside) and run until they exit the coordinate ball; line integrals of
// caller-supplied integrands f(x, v) ride along as extra ODE components, so
// ray transforms and action integrals share the step control and dense
// output of the flow itself.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mpray/error.hpp"
#include "mpray/geometry.hpp"
#include "mpray/linalg.hpp"
#include "mpray/ode.hpp"
#include "mpray/system.hpp"

namespace mpray {

// Acceleration of the MP-flow at (x, v).
inline Vec mp_acceleration(const MPSystem& sys, const Vec& x, const Vec& v) {
  const int n = sys.dim;
  const ChristoffelData cd = christoffel(sys.g, x);
  const Jet2 uj = sys.U->jet(x);
  // Lorentz term, reusing the metric inverse from the Christoffel data.
  const auto aj = sys.alpha.jets(x);
  Vec acc(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) s -= cd.gamma(i, j, k) * v[j] * v[k];
      // (Yv)^i = g^{ij} Omega_{kj} v^k, Omega_{kj} = d_k alpha_j - d_j alpha_k
      double om_vj = 0.0;  // Omega_{kj} v^k for this j
      for (int k = 0; k < n; ++k)
        om_vj += (aj[static_cast<std::size_t>(j)].g[k] -
                  aj[static_cast<std::size_t>(k)].g[j]) *
                 v[k];
      s += cd.ginv(i, j) * om_vj;
      s -= cd.ginv(i, j) * uj.g[j];
    }
    acc[i] = s;
  }
  return acc;
}

using Integrand = std::function<double(const Vec& x, const Vec& v)>;

namespace detail {

struct FlowRhs {
  const MPSystem* sys;
  const std::vector<Integrand>* integrands;

  void operator()(double, const double* y, double* dy) const {
    const int n = sys->dim;
    Vec x(n), v(n);
    for (int i = 0; i < n; ++i) {
      x[i] = y[i];
      v[i] = y[n + i];
    }
    const Vec acc = mp_acceleration(*sys, x, v);
    for (int i = 0; i < n; ++i) {
      dy[i] = v[i];
      dy[n + i] = acc[i];
    }
    if (integrands)
      for (std::size_t j = 0; j < integrands->size(); ++j)
        dy[2 * n + static_cast<int>(j)] = (*integrands)[j](x, v);
  }
};

inline std::vector<double> pack_state(const Vec& x, const Vec& v, std::size_t n_aux) {
  const int n = x.n;
  std::vector<double> y(static_cast<std::size_t>(2 * n) + n_aux, 0.0);
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = x[i];
    y[static_cast<std::size_t>(n + i)] = v[i];
  }
  return y;
}

inline void unpack_state(const std::vector<double>& y, int n, Vec* x, Vec* v) {
  *x = Vec(n);
  *v = Vec(n);
  for (int i = 0; i < n; ++i) {
    (*x)[i] = y[static_cast<std::size_t>(i)];
    (*v)[i] = y[static_cast<std::size_t>(n + i)];
  }
}

}  // namespace detail

struct RayOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  // Exit-time cap: t_max = t_max_factor * R / sqrt(min P) unless overridden.
  double t_max_factor = 50.0;
  double t_max_override = 0.0;
  long max_steps = 2000000;

  OdeOptions ode(const MPSystem& sys) const {
    OdeOptions o;
    o.rtol = rtol;
    o.atol = atol;
    o.max_steps = max_steps;
    o.t_max = t_max_override > 0.0
                  ? t_max_override
                  : t_max_factor * sys.R / std::sqrt(std::max(sys.stats.min_p, 1e-12));
    return o;
  }
};

struct RayResult {
  double tau = 0.0;  // exit time
  Vec x;             // exit point (on |x| = R up to the event tolerance)
  Vec v;             // exit velocity
  std::vector<double> integrals;  // accumulated integrand values
  long n_steps = 0;
};

// Integrates the MP-flow from (x0, v0) until the trajectory leaves the ball,
// accumulating the line integrals of `integrands` along the way.  Throws
// NumericalError if the ray does not exit before the time cap (trapped ray).
inline RayResult integrate_ray(const MPSystem& sys, const Vec& x0, const Vec& v0,
                               const std::vector<Integrand>& integrands = {},
                               const RayOptions& opt = {}, DenseOutput* dense = nullptr) {
  const int n = sys.dim;
  detail::FlowRhs rhs{&sys, &integrands};
  const OdeOptions ode_opt = opt.ode(sys);
  const double R2 = sys.R * sys.R;
  auto event = [R2, n](double, const std::vector<double>& y) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) r2 += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    return R2 - r2;
  };
  OdeResult res =
      dp54_integrate(rhs, detail::pack_state(x0, v0, integrands.size()), ode_opt.t_max,
                     ode_opt, event, dense);
  if (!res.event)
    throw NumericalError("ray did not exit the ball within t_max = " + num_str(ode_opt.t_max) +
                         " (trapped trajectory?)");
  RayResult out;
  out.tau = res.t;
  detail::unpack_state(res.y, n, &out.x, &out.v);
  out.integrals.assign(res.y.begin() + 2 * n, res.y.end());
  out.n_steps = res.n_steps;
  return out;
}

// Integrates the MP-flow for a fixed time T (no boundary event).
inline RayResult integrate_fixed(const MPSystem& sys, const Vec& x0, const Vec& v0, double T,
                                 const std::vector<Integrand>& integrands = {},
                                 const RayOptions& opt = {}, DenseOutput* dense = nullptr) {
  const int n = sys.dim;
  detail::FlowRhs rhs{&sys, &integrands};
  OdeOptions ode_opt = opt.ode(sys);
  ode_opt.t_max = std::max(ode_opt.t_max, T);
  OdeResult res = dp54_integrate(rhs, detail::pack_state(x0, v0, integrands.size()), T, ode_opt,
                                 nullptr, dense);
  RayResult out;
  out.tau = res.t;
  detail::unpack_state(res.y, n, &out.x, &out.v);
  out.integrals.assign(res.y.begin() + 2 * n, res.y.end());
  out.n_steps = res.n_steps;
  return out;
}

// Point of the MP-exponential-type map: position after time t from (x, v).
inline Vec mp_exp(const MPSystem& sys, const Vec& x, const Vec& v, double t,
                  const RayOptions& opt = {}) {
  if (t == 0.0) return x;
  return integrate_fixed(sys, x, v, t, {}, opt).x;
}

// Exit time of the ray from (x, v) (the travel-time function tau).
inline double exit_time(const MPSystem& sys, const Vec& x, const Vec& v,
                        const RayOptions& opt = {}) {
  return integrate_ray(sys, x, v, {}, opt).tau;
}

// ---------------------------------------------------------------------------
// Sampled trajectories (for CSV output and inspection).

struct TrajectorySample {
  double t = 0.0;
  Vec x, v;
  double energy = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double tau = 0.0;   // final time
  bool exited = false;
};

// Integrates to the boundary (or for fixed time T if T > 0) and returns
// `n_samples` states evenly spaced in t, evaluated on the dense output.
inline Trajectory sample_trajectory(const MPSystem& sys, const Vec& x0, const Vec& v0,
                                    int n_samples, double T = 0.0,
                                    const RayOptions& opt = {}) {
  if (n_samples < 2) throw ConfigError("trajectory sampling needs at least 2 samples");
  DenseOutput dense;
  Trajectory out;
  double t_final;
  if (T > 0.0) {
    RayResult r = integrate_fixed(sys, x0, v0, T, {}, opt, &dense);
    t_final = r.tau;
    out.exited = false;
  } else {
    RayResult r = integrate_ray(sys, x0, v0, {}, opt, &dense);
    t_final = r.tau;
    out.exited = true;
  }
  out.tau = t_final;
  std::vector<double> y;
  for (int s = 0; s < n_samples; ++s) {
    const double t = t_final * s / (n_samples - 1);
    TrajectorySample smp;
    if (dense.empty()) {
      smp.x = x0;
      smp.v = v0;
    } else {
      dense.eval(std::min(t, dense.t_end()), &y);
      detail::unpack_state(y, sys.dim, &smp.x, &smp.v);
    }
    smp.t = t;
    smp.energy = energy(sys, smp.x, smp.v);
    out.samples.push_back(std::move(smp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boundary parametrization helpers (n = 2): the boundary circle is
// parametrized by angle; inward directions by the angle theta from the
// inward normal, |theta| < pi/2.

// Boundary point at arc angle `a` (2D).
inline Vec boundary_point_2d(const MPSystem& sys, double a) {
  return Vec(sys.R * std::cos(a), sys.R * std::sin(a));
}

// Energy-k vector at boundary point x making g-angle theta with the inward
// normal (2D): v = sqrt(P) (cos(theta) nu + sin(theta) tau_hat), where
// (nu, tau_hat) is a g-orthonormal frame at x.
inline Vec boundary_vector_2d(const MPSystem& sys, const Vec& x, double theta) {
  const Vec nu = boundary_normal_inward(sys, x);
  // g-orthonormal tangent: start from the Euclidean tangent and Gram-Schmidt.
  const Mat g = sys.g.value(x);
  const double r = norm(x);
  Vec tan(-x[1] / r, x[0] / r);
  const double proj = dot(tan, g * nu);
  tan = tan - proj * nu;
  const double len = std::sqrt(dot(tan, g * tan));
  tan = (1.0 / len) * tan;
  const double sp = std::sqrt(sys.p(x));
  return sp * (std::cos(theta) * nu + std::sin(theta) * tan);
}

}  // namespace mpray
