#pragma once

// Coordinate Riemannian geometry for MP-systems: Christoffel symbols and
// their derivatives, the Lorentz operator Y of the magnetic form, musical
// isomorphisms, symmetrized covariant derivative and divergence of 1-forms,
// Riemann/sectional curvature, energy, and the boundary convexity margin.

#include <cmath>

#include "mpray/error.hpp"
#include "mpray/field.hpp"
#include "mpray/linalg.hpp"
#include "mpray/system.hpp"

namespace mpray {

struct ChristoffelData {
  Mat g;
  Mat ginv;
  Ten3 gamma;  // gamma(i,j,k) = Gamma^i_{jk}
};

struct ChristoffelDerivs {
  Mat g;
  Mat ginv;
  Ten3 gamma;
  Ten4 dgamma;  // dgamma(l,i,j,k) = d_l Gamma^i_{jk}
};

inline ChristoffelData christoffel(const MetricField& metric, const Vec& x) {
  const int n = metric.dim();
  ChristoffelData out;
  const MetricDerivs md = metric.derivs(x);
  out.g = md.g;
  out.ginv = inverse(md.g);
  out.gamma = Ten3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += out.ginv(i, l) * (md.dg(j, l, k) + md.dg(k, j, l) - md.dg(l, j, k));
        out.gamma(i, j, k) = 0.5 * s;
        out.gamma(i, k, j) = 0.5 * s;
      }
  return out;
}

inline ChristoffelDerivs christoffel_with_derivs(const MetricField& metric, const Vec& x) {
  const int n = metric.dim();
  ChristoffelDerivs out;
  const MetricDerivs2 md = metric.derivs2(x);
  out.g = md.g;
  out.ginv = inverse(md.g);
  out.gamma = Ten3(n);
  out.dgamma = Ten4(n);
  // d_m g^{il} = -g^{ia} (d_m g_{ab}) g^{bl}
  Ten3 dginv(n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += out.ginv(i, a) * md.dg(m, a, b) * out.ginv(b, l);
        dginv(m, i, l) = -s;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += out.ginv(i, l) * (md.dg(j, l, k) + md.dg(k, j, l) - md.dg(l, j, k));
        out.gamma(i, j, k) = 0.5 * s;
        out.gamma(i, k, j) = 0.5 * s;
        for (int m = 0; m < n; ++m) {
          double d = 0.0;
          for (int l = 0; l < n; ++l) {
            d += dginv(m, i, l) * (md.dg(j, l, k) + md.dg(k, j, l) - md.dg(l, j, k));
            d += out.ginv(i, l) *
                 (md.d2g(m, j, l, k) + md.d2g(m, k, j, l) - md.d2g(m, l, j, k));
          }
          out.dgamma(m, i, j, k) = 0.5 * d;
          out.dgamma(m, i, k, j) = 0.5 * d;
        }
      }
  return out;
}

// ---------------------------------------------------------------------------
// Musical isomorphisms and energy.

inline Vec sharp(const MetricField& metric, const Vec& x, const Vec& u) {
  return inverse(metric.value(x)) * u;
}

inline Vec flat(const MetricField& metric, const Vec& x, const Vec& v) {
  return metric.value(x) * v;
}

// E(x, v) = 1/2 |v|_g^2 + U(x)
inline double energy(const MPSystem& sys, const Vec& x, const Vec& v) {
  const Mat g = sys.g.value(x);
  return 0.5 * dot(v, g * v) + sys.U->value(x);
}

// Rescales a nonzero direction to the energy-k sphere: |v|_g^2 = 2(k - U).
inline Vec scale_to_energy(const MPSystem& sys, const Vec& x, const Vec& dir) {
  const Mat g = sys.g.value(x);
  const double q = dot(dir, g * dir);
  if (!(q > 0.0)) throw NumericalError("cannot scale a zero direction to the energy sphere");
  const double p = sys.p(x);
  if (!(p > 0.0)) throw NumericalError("momentum factor is not positive");
  return std::sqrt(p / q) * dir;
}

// ---------------------------------------------------------------------------
// Lorentz operator.  Omega = d(alpha), Omega_ij = d_i alpha_j - d_j alpha_i;
// the operator Y^k_i = g^{kj} Omega_{ij} acts on vectors by (Yv)^k = Y^k_i v^i
// and is g-antisymmetric.  On covectors, (Yu)_i = -Y^j_i u_j, which equals
// (Y(u^sharp))^flat.

inline Mat lorentz_omega(const MPSystem& sys, const Vec& x) {
  const int n = sys.dim;
  const auto aj = sys.alpha.jets(x);
  Mat om(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      om(i, j) = aj[static_cast<std::size_t>(j)].g[i] - aj[static_cast<std::size_t>(i)].g[j];
  return om;
}

inline Mat lorentz_matrix(const MPSystem& sys, const Vec& x) {
  const int n = sys.dim;
  const Mat om = lorentz_omega(sys, x);
  const Mat ginv = inverse(sys.g.value(x));
  Mat y(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += ginv(k, j) * om(i, j);
      y(k, i) = s;
    }
  return y;
}

inline Vec lorentz_apply(const MPSystem& sys, const Vec& x, const Vec& v) {
  return lorentz_matrix(sys, x) * v;
}

inline Vec covector_lorentz(const Mat& y, const Vec& u) {
  const int n = u.n;
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += y(j, i) * u[j];
    out[i] = -s;
  }
  return out;
}

struct LorentzDerivs {
  Mat y;
  Ten3 dy;  // dy(k,i,j) = d_k Y^i_j
};

inline LorentzDerivs lorentz_with_derivs(const MPSystem& sys, const Vec& x) {
  const int n = sys.dim;
  const auto aj = sys.alpha.jets(x);
  const MetricDerivs md = sys.g.derivs(x);
  const Mat ginv = inverse(md.g);
  Mat om(n);
  Ten3 dom(n);  // dom(k,i,j) = d_k Omega_ij
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      om(i, j) = aj[static_cast<std::size_t>(j)].g[i] - aj[static_cast<std::size_t>(i)].g[j];
      for (int k = 0; k < n; ++k)
        dom(k, i, j) =
            aj[static_cast<std::size_t>(j)].h(k, i) - aj[static_cast<std::size_t>(i)].h(k, j);
    }
  Ten3 dginv(n);
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) s += ginv(i, a) * md.dg(m, a, b) * ginv(b, l);
        dginv(m, i, l) = -s;
      }
  LorentzDerivs out;
  out.y = Mat(n);
  out.dy = Ten3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) s += ginv(i, l) * om(j, l);
      out.y(i, j) = s;
      for (int k = 0; k < n; ++k) {
        double d = 0.0;
        for (int l = 0; l < n; ++l) d += dginv(k, i, l) * om(j, l) + ginv(i, l) * dom(k, j, l);
        out.dy(k, i, j) = d;
      }
    }
  return out;
}

// Covariant derivative of Y as a (1,1)-tensor:
// (grad Y)(k,i,j) = d_k Y^i_j + Gamma^i_{km} Y^m_j - Gamma^m_{kj} Y^i_m.
inline Ten3 lorentz_covariant_derivs(const MPSystem& sys, const Vec& x) {
  const int n = sys.dim;
  const LorentzDerivs ld = lorentz_with_derivs(sys, x);
  const ChristoffelData cd = christoffel(sys.g, x);
  Ten3 out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = ld.dy(k, i, j);
        for (int m = 0; m < n; ++m)
          s += cd.gamma(i, k, m) * ld.y(m, j) - cd.gamma(m, k, j) * ld.y(i, m);
        out(k, i, j) = s;
      }
  return out;
}

// ---------------------------------------------------------------------------
// Derivatives of 1-forms.

// (d^s u)_ij = (1/2)(d_i u_j + d_j u_i) - Gamma^k_{ij} u_k
inline Mat sym_differential(const MetricField& metric, const CovectorField& u, const Vec& x) {
  const int n = metric.dim();
  const ChristoffelData cd = christoffel(metric, x);
  const auto uj = u.jets(x);
  Mat out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double s = 0.5 * (uj[static_cast<std::size_t>(j)].g[i] +
                        uj[static_cast<std::size_t>(i)].g[j]);
      for (int k = 0; k < n; ++k) s -= cd.gamma(k, i, j) * uj[static_cast<std::size_t>(k)].v;
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

// delta u = g^{ij} (d_i u_j - Gamma^k_{ij} u_k)
inline double divergence(const MetricField& metric, const CovectorField& u, const Vec& x) {
  const int n = metric.dim();
  const ChristoffelData cd = christoffel(metric, x);
  const auto uj = u.jets(x);
  double out = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = uj[static_cast<std::size_t>(j)].g[i];
      for (int k = 0; k < n; ++k) s -= cd.gamma(k, i, j) * uj[static_cast<std::size_t>(k)].v;
      out += cd.ginv(i, j) * s;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature.  R(d_i, d_j) d_k = R^l_{ijk} d_l with
// R^l_{ijk} = d_i Gamma^l_{jk} - d_j Gamma^l_{ik}
//           + Gamma^l_{im} Gamma^m_{jk} - Gamma^l_{jm} Gamma^m_{ik}.

inline Ten4 riemann(const MetricField& metric, const Vec& x) {
  const int n = metric.dim();
  const ChristoffelDerivs cd = christoffel_with_derivs(metric, x);
  Ten4 r(n);  // r(i,j,k,l) = R^l_{ijk}
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = cd.dgamma(i, l, j, k) - cd.dgamma(j, l, i, k);
          for (int m = 0; m < n; ++m)
            s += cd.gamma(l, i, m) * cd.gamma(m, j, k) - cd.gamma(l, j, m) * cd.gamma(m, i, k);
          r(i, j, k, l) = s;
        }
  return r;
}

// K(v, w) = <R(v,w)w, v> / (|v|^2 |w|^2 - <v,w>^2)
inline double sectional_curvature(const MetricField& metric, const Vec& x, const Vec& v,
                                  const Vec& w) {
  const int n = metric.dim();
  const Mat g = metric.value(x);
  const Ten4 r = riemann(metric, x);
  double num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) num += g(l, m) * v[m] * r(i, j, k, l) * v[i] * w[j] * w[k];
  const double vv = dot(v, g * v), ww = dot(w, g * w), vw = dot(v, g * w);
  const double den = vv * ww - vw * vw;
  if (!(std::abs(den) > 1e-300))
    throw NumericalError("sectional curvature of a degenerate plane");
  return num / den;
}

// ---------------------------------------------------------------------------
// Boundary geometry.  The boundary is the coordinate sphere |x| = R; the
// inward unit normal is the g-normalization of the g-gradient of
// rho(x) = R - |x|.

inline Vec boundary_normal_inward(const MPSystem& sys, const Vec& x) {
  const double r = norm(x);
  if (!(r > 0.0)) throw NumericalError("boundary normal requested at the origin");
  const int n = sys.dim;
  const Mat ginv = inverse(sys.g.value(x));
  Vec drho(n);
  for (int i = 0; i < n; ++i) drho[i] = -x[i] / r;
  Vec nu = ginv * drho;
  const double len = std::sqrt(dot(drho, nu));  // |grad rho|_g
  return (1.0 / len) * nu;
}

inline bool is_inward(const MPSystem& sys, const Vec& x, const Vec& v, double tol = 0.0) {
  const Mat g = sys.g.value(x);
  return dot(v, g * boundary_normal_inward(sys, x)) >= -tol;
}

// Second fundamental form of the boundary sphere with respect to the inward
// normal, evaluated on a tangent vector v:
// Lambda(x, v) = -Hess(rho)(v, v) / |grad rho|_g,  rho = R - |x|.
// For the Euclidean metric this is |v|^2 / R.
inline double second_fundamental_form(const MetricField& metric, double R, const Vec& x,
                                      const Vec& v) {
  (void)R;
  const int n = metric.dim();
  const double r = norm(x);
  if (!(r > 0.0)) throw NumericalError("second fundamental form requested at the origin");
  Vec drho(n);
  Mat d2rho(n);
  for (int i = 0; i < n; ++i) {
    drho[i] = -x[i] / r;
    for (int j = 0; j < n; ++j)
      d2rho(i, j) = -((i == j ? 1.0 : 0.0) - x[i] * x[j] / (r * r)) / r;
  }
  const ChristoffelData cd = christoffel(metric, x);
  double hess = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = d2rho(i, j);
      for (int k = 0; k < n; ++k) s -= cd.gamma(k, i, j) * drho[k];
      hess += v[i] * v[j] * s;
    }
  const double len = std::sqrt(dot(drho, cd.ginv * drho));
  return -hess / len;
}

// Convexity margin Lambda(x, v) - [<Y_x(v), nu>_g - dU(nu)] for x on the
// boundary and v tangent to it on the energy sphere; positive for all such
// (x, v) means the boundary is strictly convex for the MP-flow.
inline double convexity_margin(const MPSystem& sys, const Vec& x, const Vec& v) {
  const double lam = second_fundamental_form(sys.g, sys.R, x, v);
  const Vec nu = boundary_normal_inward(sys, x);
  const Vec yv = lorentz_apply(sys, x, v);
  const Mat g = sys.g.value(x);
  const Jet2 uj = sys.U->jet(x);
  double du_nu = 0.0;
  for (int i = 0; i < sys.dim; ++i) du_nu += uj.g[i] * nu[i];
  return lam - (dot(yv, g * nu) - du_nu);
}

}  // namespace mpray
