// Mane critical action, two-point shooting, its magnetic counterpart, the
// linearization identity connecting the action to the ray transform, and
// gauge transformations that leave the boundary action data unchanged.
#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "mpray/field.hpp"
#include "mpray/flow.hpp"
#include "mpray/geometry.hpp"
#include "mpray/linalg.hpp"
#include "mpray/reduction.hpp"
#include "mpray/system.hpp"
#include "mpray/transform.hpp"
#include "mpray/util.hpp"

namespace mpray {

// Lagrangian integrand L + k = |v|_g^2/2 - alpha(v) - U + k. Trajectories of
// the MP-flow are its extremals, and on the energy shell L + k = P.
inline Integrand action_integrand(const MPSystem& sys) {
  const MPSystem* s = &sys;
  return [s](const Vec& x, const Vec& v) {
    const Mat g = s->g.value(x);
    return 0.5 * dot(v, g * v) - dot(s->alpha.value(x), v) - s->U->value(x) + s->k;
  };
}

inline double mane_action(const MPSystem& sys, const Vec& x0, const Vec& v0, double T,
                          const RayOptions& opt = {}) {
  return integrate_fixed(sys, x0, v0, T, {action_integrand(sys)}, opt).integrals[0];
}

// Action of the reduced system over arclength s in [0, s_total]; for unit
// G-speed curves the kinetic part integrates to s_total.
inline double magnetic_action(const MPSystem& reduced, const Vec& x0, const Vec& w0,
                              double s_total, const RayOptions& opt = {}) {
  return integrate_fixed(reduced, x0, w0, s_total, {action_integrand(reduced)}, opt).integrals[0];
}

struct ShootResult {
  Vec v0;            // shell velocity at x0
  double T = 0.0;    // travel time
  double residual = 0.0;
  int iters = 0;
};

struct ShootOptions {
  double tol = 1e-11;
  int max_iters = 60;
  double fd_step = 1e-6;
  RayOptions ray;
};

// Finds the MP-trajectory from x0 to x1 at energy k by a damped Newton
// iteration on (direction, time). The unknown direction is parametrized as
// the chord direction plus corrections in its euclidean complement, rescaled
// onto the energy shell.
inline ShootResult shoot(const MPSystem& sys, const Vec& x0, const Vec& x1,
                         const ShootOptions& opt = {}) {
  const int n = sys.dim;
  Vec chord(n);
  for (int i = 0; i < n; ++i) chord[i] = x1[i] - x0[i];
  const double chord_len = norm(chord);
  if (chord_len < 1e-12) throw ConfigError("shooting endpoints coincide");
  for (int i = 0; i < n; ++i) chord[i] /= chord_len;

  // Euclidean complement of the chord direction.
  std::vector<Vec> comp;
  for (int i = 0; i < n; ++i) {
    Vec e(n);
    e[i] = 1.0;
    double c = dot(e, chord);
    for (int j = 0; j < n; ++j) e[j] -= c * chord[j];
    for (const Vec& b : comp) {
      c = dot(e, b);
      for (int j = 0; j < n; ++j) e[j] -= c * b[j];
    }
    const double len = norm(e);
    if (len > 0.3) {
      for (int j = 0; j < n; ++j) e[j] /= len;
      comp.push_back(e);
      if (static_cast<int>(comp.size()) == n - 1) break;
    }
  }

  const auto velocity = [&](const Vec& z) {
    Vec d = chord;
    for (int i = 0; i + 1 < n; ++i)
      for (int j = 0; j < n; ++j) d[j] += z[i] * comp[static_cast<std::size_t>(i)][j];
    return scale_to_energy(sys, x0, d);
  };
  const auto residual = [&](const Vec& z) {
    const Vec end = mp_exp(sys, x0, velocity(z), z[n - 1], opt.ray);
    Vec r(n);
    for (int i = 0; i < n; ++i) r[i] = end[i] - x1[i];
    return r;
  };

  // Seed: chord direction, time = euclidean length over the shell speed.
  Vec mid(n);
  for (int i = 0; i < n; ++i) mid[i] = 0.5 * (x0[i] + x1[i]);
  Vec z(n);
  z[n - 1] = chord_len / std::sqrt(std::max(sys.p(mid), 1e-6));

  Vec r = residual(z);
  double rn = norm(r);
  int it = 0;
  for (; it < opt.max_iters && rn > opt.tol; ++it) {
    Mat jac(n);
    for (int c = 0; c < n; ++c) {
      Vec zp = z;
      const double h = opt.fd_step * std::max(1.0, std::abs(z[c]));
      zp[c] += h;
      const Vec rp = residual(zp);
      for (int i = 0; i < n; ++i) jac(i, c) = (rp[i] - r[i]) / h;
    }
    const Vec step = solve(jac, r);
    double lambda = 1.0;
    bool improved = false;
    for (int halve = 0; halve < 25; ++halve, lambda *= 0.5) {
      Vec zn = z;
      for (int i = 0; i < n; ++i) zn[i] -= lambda * step[i];
      if (zn[n - 1] <= 0.0) continue;  // keep travel time positive
      const Vec rp = residual(zn);
      const double rpn = norm(rp);
      if (rpn < rn) {
        z = zn;
        r = rp;
        rn = rpn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (rn > std::max(opt.tol, 1e-9))
    throw NumericalError("shooting did not converge: residual " + num_str(rn));
  return ShootResult{velocity(z), z[n - 1], rn, it};
}

struct ActionComparison {
  double a_mp = 0.0;   // Mane action computed along the MP-trajectory
  double a_mag = 0.0;  // magnetic action recomputed on the reduced system
  double gap = 0.0;
};

// Computes the action of the trajectory (x0, v0) over [0, T] twice: directly,
// and through the reduced system after an independent arclength integration.
inline ActionComparison compare_actions(const MPSystem& sys, const MPSystem& reduced,
                                        const Vec& x0, const Vec& v0, double T,
                                        const RayOptions& opt = {}) {
  const MPSystem* s = &sys;
  const Integrand arclen = [s](const Vec& x, const Vec&) { return s->p(x); };
  const RayResult fwd = integrate_fixed(sys, x0, v0, T, {action_integrand(sys), arclen}, opt);
  ActionComparison out;
  out.a_mp = fwd.integrals[0];
  const double s_total = fwd.integrals[1];
  Vec w0 = v0;
  const double p0 = sys.p(x0);
  for (int i = 0; i < sys.dim; ++i) w0[i] /= p0;
  out.a_mag = magnetic_action(reduced, x0, w0, s_total, opt);
  out.gap = std::abs(out.a_mp - out.a_mag);
  return out;
}

// First variation of the boundary action under a perturbation of the system
// data in the direction of a tensor triple [h, beta, V]: along the
// unperturbed trajectory,
//   d/ds A_{g+sh, alpha+s beta, U+sV}(x0, x1) |_{s=0}
//     = int ( h(v, v)/2 - beta(v) - V ) dt.
inline double linearization_transform_value(const MPSystem& sys, const TensorTriple& f,
                                            const Vec& x0, const Vec& v0, double T,
                                            const RayOptions& opt = {}) {
  const Integrand ig = [&f](const Vec& x, const Vec& v) {
    const TripleValue t = f.value(x);
    return 0.5 * dot(v, t.h * v) - dot(t.beta, v) - t.V;
  };
  return integrate_fixed(sys, x0, v0, T, {ig}, opt).integrals[0];
}

// The system perturbed in the direction of the triple: g + s h, alpha + s
// beta, U + s V, at the same energy.
inline MPSystem perturb_system(const MPSystem& sys, const SymTensorField& h,
                               const CovectorField& beta, const ScalarFieldPtr& V, double s) {
  MetricField g = add_scaled_metric(sys.g, s, h);
  CovectorField alpha = add_scaled_covector(sys.alpha, s, beta);
  ScalarFieldPtr U = std::make_shared<SumField>(sys.U, V, 1.0, s);
  return make_system(g, alpha, U, sys.k, sys.R, sys.name + "-pert");
}

struct LinearizationReport {
  double fd_derivative = 0.0;   // central difference of the shot action
  double transform_value = 0.0; // first-variation integral on the base ray
  double residual = 0.0;
};

inline LinearizationReport linearization_check(const MPSystem& sys, const SymTensorField& h,
                                               const CovectorField& beta, const ScalarFieldPtr& V,
                                               const Vec& x0, const Vec& x1, double eps = 1e-3,
                                               const ShootOptions& opt = {}) {
  const ShootResult base = shoot(sys, x0, x1, opt);
  LinearizationReport rep;
  rep.transform_value = linearization_transform_value(sys, TensorTriple(h, beta, V), x0, base.v0,
                                                      base.T, opt.ray);
  const MPSystem plus = perturb_system(sys, h, beta, V, eps);
  const MPSystem minus = perturb_system(sys, h, beta, V, -eps);
  const ShootResult sp = shoot(plus, x0, x1, opt);
  const ShootResult sm = shoot(minus, x0, x1, opt);
  const double ap = mane_action(plus, x0, sp.v0, sp.T, opt.ray);
  const double am = mane_action(minus, x0, sm.v0, sm.T, opt.ray);
  rep.fd_derivative = (ap - am) / (2.0 * eps);
  rep.residual = std::abs(rep.fd_derivative - rep.transform_value);
  return rep;
}

// --- Gauge transformations preserving the boundary action data ---

// Pullback by a diffeomorphism of the ball that fixes the boundary.
inline MPSystem gauge_diffeo(const MPSystem& sys, const PointMap& f) {
  return make_system(pullback_metric(f, sys.g), pullback_covector(f, sys.alpha),
                     std::make_shared<PullbackScalarField>(f, sys.U), sys.k, sys.R,
                     sys.name + "-diffeo");
}

// alpha -> alpha + dpsi for psi vanishing on the boundary. The caller
// supplies dpsi as a covector field with exact jets; the Lorentz force is
// unchanged since d(dpsi) = 0.
inline MPSystem gauge_exact_form(const MPSystem& sys, const CovectorField& dpsi) {
  return make_system(sys.g, add_scaled_covector(sys.alpha, 1.0, dpsi), sys.U, sys.k, sys.R,
                     sys.name + "-exact");
}

// Conformal energy gauge: g -> g / mu, U -> mu (U - k) + k for mu > 0 equal
// to 1 on the boundary. The reduced metric 2(k - U') g' = 2(k - U) g is
// unchanged, hence so is every boundary action value.
inline MPSystem gauge_conformal(const MPSystem& sys, const ScalarFieldPtr& mu) {
  const ScalarFieldPtr inv_mu =
      std::make_shared<QuotientField>(make_constant_field(sys.dim, 1.0), mu);
  const ScalarFieldPtr u_minus_k = std::make_shared<AffineField>(-sys.k, 1.0, sys.U);
  const ScalarFieldPtr scaled = std::make_shared<ProductField>(mu, u_minus_k);
  const ScalarFieldPtr u_new = std::make_shared<AffineField>(sys.k, 1.0, scaled);
  return make_system(scale_metric(inv_mu, sys.g), sys.alpha, u_new, sys.k, sys.R,
                     sys.name + "-conf");
}

// Table of boundary actions A(a_i -> a_j) over a grid of boundary angles
// (2D). The diagonal is zero by convention.
inline std::vector<std::vector<double>> boundary_action_table(const MPSystem& sys,
                                                              const std::vector<double>& angles,
                                                              const ShootOptions& opt = {}) {
  const std::size_t m = angles.size();
  std::vector<std::vector<double>> table(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const Vec xi = boundary_point_2d(sys, angles[i]);
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const Vec xj = boundary_point_2d(sys, angles[j]);
      const ShootResult sr = shoot(sys, xi, xj, opt);
      table[i][j] = mane_action(sys, xi, sr.v0, sr.T, opt.ray);
    }
  }
  return table;
}

}  // namespace mpray
