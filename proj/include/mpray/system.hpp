#pragma once

// MP-systems: a Riemannian metric g, a magnetic 1-form alpha, and a potential
// U on the closed coordinate ball of radius R, studied at a fixed energy
// level k with k > max U.  Construction validates positive-definiteness of g
// and the energy condition on a sample grid and caches the extremes of the
// momentum factor P = 2(k - U).

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mpray/error.hpp"
#include "mpray/field.hpp"
#include "mpray/linalg.hpp"
#include "mpray/util.hpp"

namespace mpray {

struct SystemStats {
  double min_p = 0.0;    // min of 2(k-U) over the sample grid
  double max_p = 0.0;    // max of 2(k-U)
  double max_u = 0.0;    // max of U
  double min_eig = 0.0;  // smallest metric eigenvalue seen
};

struct MPSystem {
  int dim = 0;
  double R = 0.0;  // ball radius
  double k = 0.0;  // energy level
  std::string name;
  MetricField g;
  CovectorField alpha;
  ScalarFieldPtr U;
  ScalarFieldPtr P;  // 2(k - U) as a field with exact jets
  SystemStats stats;

  double p(const Vec& x) const { return P->value(x); }
  bool contains(const Vec& x, double tol = 1e-9) const { return norm(x) <= R + tol; }
};

namespace detail {

inline void validate_point(const MPSystem& sys, const Vec& x, SystemStats* st, bool* first) {
  const Mat gx = sys.g.value(x);
  const double eig = min_eigenvalue_sym(gx);
  const double u = sys.U->value(x);
  const double p = 2.0 * (sys.k - u);
  if (*first) {
    st->min_p = st->max_p = p;
    st->max_u = u;
    st->min_eig = eig;
    *first = false;
  } else {
    st->min_p = std::min(st->min_p, p);
    st->max_p = std::max(st->max_p, p);
    st->max_u = std::max(st->max_u, u);
    st->min_eig = std::min(st->min_eig, eig);
  }
}

}  // namespace detail

// Builds and validates an MP-system.  Throws NumericalError if the metric is
// not positive definite at some sample point, ConfigError if k <= max U.
inline MPSystem make_system(MetricField g, CovectorField alpha, ScalarFieldPtr U, double k,
                            double R, std::string name = "") {
  if (g.dim() < 2 || g.dim() > 3) throw ConfigError("dimension must be 2 or 3");
  if (!(R > 0.0)) throw ConfigError("ball radius must be positive");
  if (alpha.dim != g.dim() || U->dim() != g.dim())
    throw ConfigError("field dimensions disagree with the metric");

  MPSystem sys;
  sys.dim = g.dim();
  sys.R = R;
  sys.k = k;
  sys.name = std::move(name);
  sys.g = std::move(g);
  sys.alpha = std::move(alpha);
  sys.U = std::move(U);
  sys.P = std::make_shared<AffineField>(2.0 * k, -2.0, sys.U);

  // Sample grid: Cartesian lattice intersected with the ball, plus explicit
  // boundary samples (extremes of U and of the metric often sit on |x| = R).
  SystemStats st;
  bool first = true;
  const int n = sys.dim;
  const int half = 6;
  const double h = R / half;
  if (n == 2) {
    for (int i = -half; i <= half; ++i)
      for (int j = -half; j <= half; ++j) {
        Vec x(h * i, h * j);
        if (norm(x) <= R) detail::validate_point(sys, x, &st, &first);
      }
    for (int a = 0; a < 64; ++a) {
      const double t = 2.0 * M_PI * a / 64.0;
      detail::validate_point(sys, Vec(R * std::cos(t), R * std::sin(t)), &st, &first);
    }
  } else {
    for (int i = -half; i <= half; ++i)
      for (int j = -half; j <= half; ++j)
        for (int l = -half; l <= half; ++l) {
          Vec x(h * i, h * j, h * l);
          if (norm(x) <= R) detail::validate_point(sys, x, &st, &first);
        }
    for (int a = 1; a < 16; ++a)
      for (int b = 0; b < 32; ++b) {
        const double th = M_PI * a / 16.0, ph = 2.0 * M_PI * b / 32.0;
        Vec x(R * std::sin(th) * std::cos(ph), R * std::sin(th) * std::sin(ph),
              R * std::cos(th));
        detail::validate_point(sys, x, &st, &first);
      }
    detail::validate_point(sys, Vec(0, 0, R), &st, &first);
    detail::validate_point(sys, Vec(0, 0, -R), &st, &first);
  }

  if (!(st.min_eig > 0.0))
    throw NumericalError("metric is not positive definite on the ball (min eigenvalue " +
                         num_str(st.min_eig) + ")");
  if (!(sys.k > st.max_u))
    throw ConfigError("energy level k = " + num_str(k) + " does not exceed max U = " +
                      num_str(st.max_u));
  sys.stats = st;
  return sys;
}

// ---------------------------------------------------------------------------
// Catalog systems (all on the unit ball at energy 1/2 unless stated).

// Euclidean, no magnetic field, no potential.
inline MPSystem make_sys_e() {
  return make_system(MetricField::euclidean(2), CovectorField::zero(2),
                     make_constant_field(2, 0.0), 0.5, 1.0, "SYS-E");
}

// Constant magnetic field B on the Euclidean disc:
// alpha = (B/2)(-x2 dx1 + x1 dx2), so Omega = B dx1^dx2.
inline MPSystem make_sys_b_named(double B, std::string name) {
  const std::string hb = num_str(B / 2.0);
  CovectorField alpha = CovectorField::from_exprs(2, {"-(" + hb + "*x2)", hb + "*x1", ""});
  return make_system(MetricField::euclidean(2), std::move(alpha), make_constant_field(2, 0.0),
                     0.5, 1.0, std::move(name));
}

inline MPSystem make_sys_b(double B = 0.2) { return make_sys_b_named(B, "SYS-B"); }

// Radial quadratic potential U = eps*|x|^2 on the Euclidean disc.
inline MPSystem make_sys_u(double eps = 0.1) {
  ScalarFieldPtr U = make_expr_field(num_str(eps) + "*(x1^2+x2^2)", 2);
  return make_system(MetricField::euclidean(2), CovectorField::zero(2), std::move(U), 0.5, 1.0,
                     "SYS-U");
}

// Conformal metric g = exp(2*lam*|x|^2) * delta, no magnetic field/potential.
inline MPSystem make_sys_c(double lam = 0.05) {
  ScalarFieldPtr factor = make_expr_field("exp(" + num_str(2.0 * lam) + "*(x1^2+x2^2))", 2);
  return make_system(MetricField::conformal(std::move(factor)), CovectorField::zero(2),
                     make_constant_field(2, 0.0), 0.5, 1.0, "SYS-C");
}

// Three-dimensional Euclidean ball (for dimension-generic checks).
inline MPSystem make_sys_e3() {
  return make_system(MetricField::euclidean(3), CovectorField::zero(3),
                     make_constant_field(3, 0.0), 0.5, 1.0, "SYS-E3");
}

inline std::vector<MPSystem> make_catalog() {
  std::vector<MPSystem> out;
  out.push_back(make_sys_e());
  out.push_back(make_sys_b(0.2));
  out.push_back(make_sys_u(0.1));
  out.push_back(make_sys_c(0.05));
  return out;
}

}  // namespace mpray
