// Differential operators on potential generators and the reduction diagram.
//
// A generator w = [u, phi, eta] (covector, function, function) produces the
// "potential" tensor triples that the ray transform annihilates when u and
// phi vanish on the boundary:
//
//   d1[u, phi]      = [ d^s u,  dphi - Y(u),  -(dU, u)_g ]
//   d2[u, phi, eta] = d1[u, phi] + eta * [ -g/2, 0, k - U ]
//
// On the magnetic side a generator is a pair [u, phi] and
//
//   d_M[u, phi] = [ d_G^s u,  dphi - Y_G(u) ]
//
// with everything taken with respect to the reduced system. The map
// phi_generator [u, phi, eta] = [P u, phi] intertwines the two:
// phi_map(d2 w) = d_M(phi_generator w).
#pragma once

#include <string>
#include <utility>

#include "mpray/field.hpp"
#include "mpray/geometry.hpp"
#include "mpray/linalg.hpp"
#include "mpray/rng.hpp"
#include "mpray/system.hpp"
#include "mpray/transform.hpp"
#include "mpray/util.hpp"

namespace mpray {

struct MPGenerator {
  CovectorField u;
  ScalarFieldPtr phi;
  ScalarFieldPtr eta;
};

struct MagneticGenerator {
  CovectorField u;
  ScalarFieldPtr phi;
};

namespace detail {

// Shared core of d1 and d_M: [d^s u, dphi - Y(u)] for the given system's
// metric and magnetic form.
inline void symmetric_pair_value(const MPSystem& sys, const CovectorField& u,
                                 const ScalarFieldPtr& phi, const Vec& x, Mat* h, Vec* beta) {
  *h = sym_differential(sys.g, u, x);
  const Mat y = lorentz_matrix(sys, x);
  const Vec yu = covector_lorentz(y, u.value(x));
  const Jet2 pj = phi->jet(x);
  Vec b(sys.dim);
  for (int i = 0; i < sys.dim; ++i) b[i] = pj.g[i] - yu[i];
  *beta = b;
}

}  // namespace detail

inline TensorTriple d1_generator(const MPSystem& sys, const CovectorField& u,
                                 const ScalarFieldPtr& phi) {
  const MPSystem* s = &sys;
  return TensorTriple::from_function(sys.dim, [s, u, phi](const Vec& x) {
    TripleValue out;
    detail::symmetric_pair_value(*s, u, phi, x, &out.h, &out.beta);
    const Mat gi = inverse(s->g.value(x));
    const Jet2 uj = s->U->jet(x);
    const Vec uval = u.value(x);
    double v = 0.0;
    for (int i = 0; i < s->dim; ++i)
      for (int j = 0; j < s->dim; ++j) v -= gi(i, j) * uj.g[i] * uval[j];
    out.V = v;
    return out;
  });
}

inline TensorTriple d2_generator(const MPSystem& sys, const CovectorField& u,
                                 const ScalarFieldPtr& phi, const ScalarFieldPtr& eta) {
  const MPSystem* s = &sys;
  const TensorTriple first = d1_generator(sys, u, phi);
  return TensorTriple::from_function(sys.dim, [s, first, eta](const Vec& x) {
    TripleValue out = first.value(x);
    const double e = eta->value(x);
    const Mat g = s->g.value(x);
    for (int i = 0; i < s->dim; ++i)
      for (int j = 0; j < s->dim; ++j) out.h(i, j) -= 0.5 * e * g(i, j);
    out.V += e * (s->k - s->U->value(x));
    return out;
  });
}

inline TensorTriple d2_generator(const MPSystem& sys, const MPGenerator& w) {
  return d2_generator(sys, w.u, w.phi, w.eta);
}

// The magnetic-side operator; `magnetic` is typically reduce(sys), but the
// formula only uses the metric and magnetic form of the system passed in.
inline MagneticPair dm_generator(const MPSystem& magnetic, const CovectorField& u,
                                 const ScalarFieldPtr& phi) {
  const MPSystem* s = &magnetic;
  return MagneticPair::from_function(magnetic.dim, [s, u, phi](const Vec& x) {
    PairValue out;
    detail::symmetric_pair_value(*s, u, phi, x, &out.h, &out.beta);
    return out;
  });
}

inline MagneticGenerator phi_generator(const MPSystem& sys, const MPGenerator& w) {
  return MagneticGenerator{scale_covector(sys.P, w.u), w.phi};
}

// Max-entry residual of phi_map(d2 w) - d_M(phi_generator w) at x.
inline double diagram_residual(const MPSystem& sys, const MPSystem& reduced,
                               const MPGenerator& w, const Vec& x) {
  const MagneticPair lhs = phi_map(sys, d2_generator(sys, w));
  const MagneticGenerator pw = phi_generator(sys, w);
  const MagneticPair rhs = dm_generator(reduced, pw.u, pw.phi);
  const PairValue a = lhs.value(x);
  const PairValue b = rhs.value(x);
  double r = 0.0;
  for (int i = 0; i < sys.dim; ++i) {
    r = std::max(r, std::abs(a.beta[i] - b.beta[i]));
    for (int j = 0; j < sys.dim; ++j) r = std::max(r, std::abs(a.h(i, j) - b.h(i, j)));
  }
  return r;
}

// Random generator whose u and phi vanish (to second order) on the boundary
// sphere; eta is a free polynomial.
inline MPGenerator random_boundary_vanishing_generator(const MPSystem& sys, int deg, double amp,
                                                       Rng* rng) {
  std::string r2 = "x1^2+x2^2";
  if (sys.dim == 3) r2 += "+x3^2";
  const std::string cutoff = "(" + num_str(sys.R * sys.R) + "-(" + r2 + "))^2";
  MPGenerator w;
  w.u.dim = sys.dim;
  for (int i = 0; i < sys.dim; ++i)
    w.u.comp[static_cast<std::size_t>(i)] = make_expr_field(
        cutoff + "*(" + random_polynomial(sys.dim, deg, amp, rng) + ")", sys.dim);
  w.phi = make_expr_field(cutoff + "*(" + random_polynomial(sys.dim, deg, amp, rng) + ")",
                          sys.dim);
  w.eta = make_expr_field(random_polynomial(sys.dim, deg, amp, rng), sys.dim);
  return w;
}

// Size proxy used to scale tolerances: max over sample points of
// |u|_infty + |phi| + |eta|.
inline double generator_sup_norm(const MPSystem& sys, const MPGenerator& w) {
  double m = 0.0;
  const int n_r = 5, n_a = 16;
  for (int ir = 0; ir <= n_r; ++ir) {
    const double r = sys.R * ir / n_r;
    for (int ia = 0; ia < n_a; ++ia) {
      const double a = 2.0 * M_PI * ia / n_a;
      Vec x = (sys.dim == 2) ? Vec(r * std::cos(a), r * std::sin(a))
                             : Vec(r * std::cos(a), r * std::sin(a) * 0.6, r * std::sin(a) * 0.8);
      const Vec uv = w.u.value(x);
      double here = std::abs(w.phi->value(x)) + std::abs(w.eta->value(x));
      for (int i = 0; i < sys.dim; ++i) here += std::abs(uv[i]);
      m = std::max(m, here);
    }
  }
  return m;
}

}  // namespace mpray
