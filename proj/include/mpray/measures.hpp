#pragma once

// Measures and quadratures on an MP-system at energy k:
//  - the boundary fan over the inward bundle with the measure
//      d mu_k = <v, nu_k>_g  d sigma_k   (nu_k = P^{1/2} nu),
//    which in 2D reads P^{3/2} cos(theta) d theta d ell_g and in 3D
//    P^2 cos(theta) d omega(v) dA_g;
//  - the phase-space measure d Sigma = P^{(n-1)/2} d omega(v) dVol_g on the
//    energy shell S^k M;
//  - the Santalo identity
//      int_{S^k M} f dSigma
//        = int_{boundary fan} ( int_0^tau P^{1/2} f dt ) P^{-1} d mu_k,
//    evaluated by two independent quadratures as a residual check;
//  - the curvature functional: k_mu(x, v) built from the reduced magnetic
//    system and the verdict sup_gamma T_gamma int k_mu^+ <= 4.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "mpray/flow.hpp"
#include "mpray/geometry.hpp"
#include "mpray/reduction.hpp"
#include "mpray/system.hpp"
#include "mpray/util.hpp"

namespace mpray {

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes/weights on [-1, 1] (Newton iteration on P_n).

inline void gauss_legendre(int n, std::vector<double>* x, std::vector<double>* w) {
  if (n < 1) throw ConfigError("Gauss-Legendre order must be positive");
  x->assign(static_cast<std::size_t>(n), 0.0);
  w->assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    (*x)[static_cast<std::size_t>(i)] = -z;
    (*x)[static_cast<std::size_t>(n - 1 - i)] = z;
    (*w)[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    (*w)[static_cast<std::size_t>(n - 1 - i)] = (*w)[static_cast<std::size_t>(i)];
  }
}

// ---------------------------------------------------------------------------
// Quadrature resolutions.  `refined(f)` scales every count by f (the Santalo
// residual check uses f = 2).

struct QuadratureSpec {
  int n_boundary = 32;  // boundary points (2D: angles; 3D: azimuthal count)
  int n_dirs = 8;       // fan directions per boundary point (per angle in 3D)
  int n_radial = 32;    // radial Gauss-Legendre order for volume integrals
  int n_angular = 64;   // spatial angles (3D: azimuthal; polar = half)
  int n_fiber = 32;     // fiber directions per spatial point

  QuadratureSpec refined(int f) const {
    QuadratureSpec s = *this;
    s.n_boundary *= f;
    s.n_dirs *= f;
    s.n_radial *= f;
    s.n_angular *= f;
    s.n_fiber *= f;
    return s;
  }
  void validate() const {
    if (n_boundary < 8 || n_dirs < 2 || n_radial < 2 || n_angular < 4 || n_fiber < 4)
      throw ConfigError("quadrature resolution too small (need n_boundary >= 8)");
  }
};

// ---------------------------------------------------------------------------
// g-orthonormal frames (deterministic Gram-Schmidt over the coordinate basis).

inline std::vector<Vec> orthonormal_frame(const Mat& g) {
  const int n = g.n;
  std::vector<Vec> frame;
  for (int i = 0; i < n; ++i) {
    Vec e(n);
    e[i] = 1.0;
    for (const Vec& f : frame) e = e - dot(e, g * f) * f;
    const double len = std::sqrt(dot(e, g * e));
    if (!(len > 1e-12)) throw NumericalError("degenerate metric in frame construction");
    frame.push_back((1.0 / len) * e);
  }
  return frame;
}

// Completes a g-unit vector v to a g-orthonormal frame {v, e_1, ...}.
inline std::vector<Vec> complement_frame(const Mat& g, const Vec& v) {
  const int n = g.n;
  std::vector<Vec> frame{v};
  for (int i = 0; i < n && static_cast<int>(frame.size()) < n; ++i) {
    Vec e(n);
    e[i] = 1.0;
    for (const Vec& f : frame) e = e - dot(e, g * f) * f;
    const double len = std::sqrt(dot(e, g * e));
    if (len > 1e-8) frame.push_back((1.0 / len) * e);
  }
  if (static_cast<int>(frame.size()) != n)
    throw NumericalError("failed to complete an orthonormal frame");
  frame.erase(frame.begin());
  return frame;
}

// ---------------------------------------------------------------------------
// Boundary fan: nodes (x, v) in the inward bundle with d mu_k weights.

struct FanNode {
  Vec x;
  Vec v;
  double weight = 0.0;  // d mu_k weight
  double a = 0.0;       // boundary parameter (2D: angle)
  double theta = 0.0;   // angle from the inward normal
};

struct BoundaryFan {
  std::vector<FanNode> nodes;
};

inline BoundaryFan boundary_fan(const MPSystem& sys, const QuadratureSpec& spec = {}) {
  spec.validate();
  BoundaryFan fan;
  if (sys.dim == 2) {
    std::vector<double> tq, tw;
    gauss_legendre(spec.n_dirs, &tq, &tw);
    const double wa = 2.0 * M_PI / spec.n_boundary;
    for (int ia = 0; ia < spec.n_boundary; ++ia) {
      const double a = wa * ia;
      const Vec x = boundary_point_2d(sys, a);
      // Boundary g-arclength element |dx/da|_g.
      const Mat g = sys.g.value(x);
      const Vec tvec(-sys.R * std::sin(a), sys.R * std::cos(a));
      const double dl = std::sqrt(dot(tvec, g * tvec));
      const double p = sys.p(x);
      for (int it = 0; it < spec.n_dirs; ++it) {
        const double theta = 0.5 * M_PI * tq[static_cast<std::size_t>(it)];
        const double wt = 0.5 * M_PI * tw[static_cast<std::size_t>(it)];
        FanNode node;
        node.x = x;
        node.v = boundary_vector_2d(sys, x, theta);
        node.a = a;
        node.theta = theta;
        node.weight = wa * dl * wt * std::pow(p, 1.5) * std::cos(theta);
        fan.nodes.push_back(std::move(node));
      }
    }
  } else {
    // Boundary sphere: Gauss-Legendre in u = cos(polar) x uniform azimuth.
    const int n_pol = std::max(4, spec.n_boundary / 2);
    std::vector<double> uq, uw;
    gauss_legendre(n_pol, &uq, &uw);
    const double wph = 2.0 * M_PI / spec.n_boundary;
    // Directions: Gauss-Legendre in u = cos(theta) on (0,1) times azimuth.
    std::vector<double> cq, cw;
    gauss_legendre(spec.n_dirs, &cq, &cw);
    const int n_psi = 2 * spec.n_dirs;
    const double wpsi = 2.0 * M_PI / n_psi;
    for (int iu = 0; iu < n_pol; ++iu) {
      const double u = uq[static_cast<std::size_t>(iu)];
      const double st = std::sqrt(1.0 - u * u);
      for (int ip = 0; ip < spec.n_boundary; ++ip) {
        const double ph = wph * ip;
        const Vec x(sys.R * st * std::cos(ph), sys.R * st * std::sin(ph), sys.R * u);
        const Mat g = sys.g.value(x);
        // Tangents of x(u, phi): d/du and d/dphi.
        const Vec xu(sys.R * (-u / st) * std::cos(ph), sys.R * (-u / st) * std::sin(ph), sys.R);
        const Vec xp(-sys.R * st * std::sin(ph), sys.R * st * std::cos(ph), 0.0);
        const double E = dot(xu, g * xu), F = dot(xu, g * xp), G2 = dot(xp, g * xp);
        const double area = std::sqrt(std::max(E * G2 - F * F, 0.0));
        const double p = sys.p(x);
        const Vec nu = boundary_normal_inward(sys, x);
        const std::vector<Vec> tang = complement_frame(g, nu);
        for (int ic = 0; ic < spec.n_dirs; ++ic) {
          const double c = 0.5 * (cq[static_cast<std::size_t>(ic)] + 1.0);  // cos(theta) in (0,1)
          const double wc = 0.5 * cw[static_cast<std::size_t>(ic)];
          const double sth = std::sqrt(1.0 - c * c);
          for (int is = 0; is < n_psi; ++is) {
            const double psi = wpsi * is;
            FanNode node;
            node.x = x;
            node.v = std::sqrt(p) *
                     (c * nu + sth * (std::cos(psi) * tang[0] + std::sin(psi) * tang[1]));
            node.a = ph;
            node.theta = std::acos(std::min(c, 1.0));
            // d mu_k = P^2 cos(theta) d omega dA_g;  cos sin dtheta = u du.
            node.weight = uw[static_cast<std::size_t>(iu)] * wph * area * p * p * c * wc * wpsi;
            fan.nodes.push_back(std::move(node));
          }
        }
      }
    }
  }
  return fan;
}

// Integral of a per-node functional over the fan (ordered reduction).
inline double boundary_integral(const BoundaryFan& fan,
                                const std::function<double(const FanNode&)>& f, int threads = 1) {
  std::vector<double> vals(fan.nodes.size());
  parallel_for(fan.nodes.size(), threads,
               [&](std::size_t i) { vals[i] = f(fan.nodes[i]); });
  double total = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) total += vals[i] * fan.nodes[i].weight;
  return total;
}

// ---------------------------------------------------------------------------
// Phase-space quadrature on S^k M.

using PhaseFunction = std::function<double(const Vec& x, const Vec& v)>;

namespace detail {

struct SpatialNode {
  Vec x;
  double w = 0.0;  // dVol_g weight
};

// Quadrature nodes for integrals over the ball with respect to dVol_g.
inline std::vector<SpatialNode> spatial_nodes(const MPSystem& sys, const QuadratureSpec& spec) {
  std::vector<double> rq, rw;
  gauss_legendre(spec.n_radial, &rq, &rw);
  std::vector<SpatialNode> pts;
  if (sys.dim == 2) {
    const double wa = 2.0 * M_PI / spec.n_angular;
    for (int ir = 0; ir < spec.n_radial; ++ir) {
      const double r = 0.5 * sys.R * (rq[static_cast<std::size_t>(ir)] + 1.0);
      const double wr = 0.5 * sys.R * rw[static_cast<std::size_t>(ir)];
      for (int ia = 0; ia < spec.n_angular; ++ia) {
        const double a = wa * ia;
        SpatialNode nd;
        nd.x = Vec(r * std::cos(a), r * std::sin(a));
        nd.w = wr * wa * r * std::sqrt(det(sys.g.value(nd.x)));
        pts.push_back(std::move(nd));
      }
    }
  } else {
    const int n_pol = std::max(4, spec.n_angular / 2);
    std::vector<double> uq, uw;
    gauss_legendre(n_pol, &uq, &uw);
    const double wph = 2.0 * M_PI / spec.n_angular;
    for (int ir = 0; ir < spec.n_radial; ++ir) {
      const double r = 0.5 * sys.R * (rq[static_cast<std::size_t>(ir)] + 1.0);
      const double wr = 0.5 * sys.R * rw[static_cast<std::size_t>(ir)];
      for (int iu = 0; iu < n_pol; ++iu) {
        const double u = uq[static_cast<std::size_t>(iu)];
        const double st = std::sqrt(1.0 - u * u);
        for (int ip = 0; ip < spec.n_angular; ++ip) {
          const double ph = wph * ip;
          SpatialNode nd;
          nd.x = Vec(r * st * std::cos(ph), r * st * std::sin(ph), r * u);
          nd.w = wr * uw[static_cast<std::size_t>(iu)] * wph * r * r *
                 std::sqrt(det(sys.g.value(nd.x)));
          pts.push_back(std::move(nd));
        }
      }
    }
  }
  return pts;
}

}  // namespace detail

// Integral over the ball with respect to the Riemannian volume of g.
inline double volume_integral(const MPSystem& sys, const std::function<double(const Vec&)>& f,
                              const QuadratureSpec& spec = {}, int threads = 1) {
  spec.validate();
  const std::vector<detail::SpatialNode> pts = detail::spatial_nodes(sys, spec);
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) { vals[i] = f(pts[i].x); });
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) total += vals[i] * pts[i].w;
  return total;
}

inline double phase_integral(const MPSystem& sys, const PhaseFunction& f,
                             const QuadratureSpec& spec = {}, int threads = 1) {
  spec.validate();
  const std::vector<detail::SpatialNode> pts = detail::spatial_nodes(sys, spec);
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) {
    const Vec& x = pts[i].x;
    const Mat g = sys.g.value(x);
    const double p = sys.p(x);
    const std::vector<Vec> frame = orthonormal_frame(g);
    const double sp = std::sqrt(p);
    double fiber = 0.0;
    if (sys.dim == 2) {
      const double wv = 2.0 * M_PI / spec.n_fiber;
      for (int iv = 0; iv < spec.n_fiber; ++iv) {
        const double a = wv * iv;
        const Vec v = sp * (std::cos(a) * frame[0] + std::sin(a) * frame[1]);
        fiber += wv * f(x, v);
      }
      fiber *= sp;  // P^{1/2}: fiber circle has g-length 2 pi sqrt(P)
    } else {
      const int n_pol = std::max(4, spec.n_fiber / 2);
      std::vector<double> uq, uw;
      gauss_legendre(n_pol, &uq, &uw);
      const double wps = 2.0 * M_PI / spec.n_fiber;
      for (int iu = 0; iu < n_pol; ++iu) {
        const double u = uq[static_cast<std::size_t>(iu)];
        const double st = std::sqrt(1.0 - u * u);
        for (int is = 0; is < spec.n_fiber; ++is) {
          const double ps = wps * is;
          const Vec v = sp * (st * std::cos(ps) * frame[0] + st * std::sin(ps) * frame[1] +
                              u * frame[2]);
          fiber += uw[static_cast<std::size_t>(iu)] * wps * f(x, v);
        }
      }
      fiber *= p;  // P^{(n-1)/2} for n = 3
    }
    vals[i] = fiber;
  });

  double total = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) total += vals[i] * pts[i].w;
  return total;
}

// ---------------------------------------------------------------------------
// Santalo residual: the same integral from both sides of the identity.

struct SantaloReport {
  double lhs = 0.0;      // phase-space quadrature of f
  double rhs = 0.0;      // fan quadrature of the ray integrals
  double abs_gap = 0.0;
  double rel_gap = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|)
};

inline SantaloReport santalo_residual(const MPSystem& sys, const PhaseFunction& f,
                                      const QuadratureSpec& spec = {}, int threads = 1,
                                      const RayOptions& ray_opt = {}) {
  SantaloReport rep;
  rep.lhs = phase_integral(sys, f, spec, threads);
  const BoundaryFan fan = boundary_fan(sys, spec);
  std::vector<Integrand> fns;
  fns.push_back([&](const Vec& x, const Vec& v) { return std::sqrt(sys.p(x)) * f(x, v); });
  rep.rhs = boundary_integral(
      fan,
      [&](const FanNode& nd) {
        const RayResult r = integrate_ray(sys, nd.x, nd.v, fns, ray_opt);
        return r.integrals[0] / sys.p(nd.x);
      },
      threads);
  rep.abs_gap = std::abs(rep.lhs - rep.rhs);
  rep.rel_gap = rep.abs_gap / std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  return rep;
}

// ---------------------------------------------------------------------------
// Curvature functional of the reduced magnetic system.
//
// For a G-unit vector v, over G-unit w orthogonal to v:
//   q(w) = 2 K_G(v, w) + <Y_G(w), v>_G^2 + (n + 3) |Y_G(w)|_G^2
//          - 2 <(grad^G_w Y_G)(v), w>_G,
// and k_mu(x, v) = sup q(w).  q is quadratic in w, so the sup over the unit
// sphere of w is the largest eigenvalue of the restricted form (in 2D there
// is a single direction).

namespace detail {

struct KmuEvaluator {
  const MPSystem* red;  // reduced system (G, alpha, 0, 1/2)

  double operator()(const Vec& x, const Vec& v_unit) const {
    const int n = red->dim;
    const Mat G = red->g.value(x);
    const Ten4 riem = riemann(red->g, x);
    const Mat y = lorentz_matrix(*red, x);
    const Ten3 ny = lorentz_covariant_derivs(*red, x);
    const std::vector<Vec> perp = complement_frame(G, v_unit);

    auto q_bilinear = [&](const Vec& w1, const Vec& w2) {
      // Polarization of q: all four terms are bilinear in (w1, w2).
      double rterm = 0.0;  // <R(v,w1)w2, v>_G
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int kk = 0; kk < n; ++kk)
            for (int l = 0; l < n; ++l)
              for (int m = 0; m < n; ++m)
                rterm += G(l, m) * v_unit[m] * riem(i, j, kk, l) * v_unit[i] * w1[j] * w2[kk];
      const Vec yw1 = y * w1, yw2 = y * w2;
      const double yterm = dot(yw1, G * v_unit) * dot(yw2, G * v_unit);
      const double nterm = (n + 3) * dot(yw1, G * yw2);
      // <(grad_w1 Y)(v), w2>_G
      Vec gyv(n);
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int kk = 0; kk < n; ++kk)
          for (int j = 0; j < n; ++j) s += w1[kk] * ny(kk, i, j) * v_unit[j];
        gyv[i] = s;
      }
      const double gterm = dot(gyv, G * w2);
      return 2.0 * rterm + yterm + nterm - 2.0 * gterm;
    };

    if (n == 2) return q_bilinear(perp[0], perp[0]);
    const double q11 = q_bilinear(perp[0], perp[0]);
    const double q22 = q_bilinear(perp[1], perp[1]);
    const double q12 = 0.5 * (q_bilinear(perp[0], perp[1]) + q_bilinear(perp[1], perp[0]));
    const double tr = 0.5 * (q11 + q22);
    const double disc = std::sqrt(std::max(tr * tr - (q11 * q22 - q12 * q12), 0.0));
    return tr + disc;
  }
};

}  // namespace detail

// k_mu at a single phase point of the ORIGINAL system: (x, v) on S^k M is
// mapped to the reduced unit bundle via v -> v / P(x).
inline double curvature_kmu(const MPSystem& sys, const MPSystem& reduced, const Vec& x,
                            const Vec& v) {
  detail::KmuEvaluator ev{&reduced};
  return ev(x, (1.0 / sys.p(x)) * v);
}

struct CurvatureReport {
  double k_sup = 0.0;     // sup over fan rays of T_gamma * int k_mu^+ ds
  double kmu_max = 0.0;   // largest k_mu seen along any ray
  bool verifiable = false;  // k_sup <= 4
  double worst_a = 0.0, worst_theta = 0.0;  // fan parameters of the supremum
};

inline CurvatureReport curvature_bound(const MPSystem& sys, const QuadratureSpec& spec = {},
                                       int threads = 1, const RayOptions& ray_opt = {}) {
  const MPSystem red = reduce(sys);
  detail::KmuEvaluator ev{&red};
  const BoundaryFan fan = boundary_fan(sys, spec);

  struct RayScore {
    double score = 0.0, kmu = 0.0;
  };
  std::vector<RayScore> scores(fan.nodes.size());
  parallel_for(fan.nodes.size(), threads, [&](std::size_t i) {
    const FanNode& nd = fan.nodes[i];
    // Reduced ray from the same phase point: w = v / P.
    const Vec w0 = (1.0 / sys.p(nd.x)) * nd.v;
    std::vector<Integrand> fns;
    fns.push_back([&](const Vec& x, const Vec& w) { return std::max(ev(x, w), 0.0); });
    DenseOutput dense;
    const RayResult r = integrate_ray(red, nd.x, w0, fns, ray_opt, &dense);
    scores[i].score = r.tau * r.integrals[0];
    // Largest k_mu along the ray, sampled on the dense output.
    double km = ev(nd.x, w0);
    std::vector<double> y;
    Vec xs, ws;
    for (int s = 1; s <= 32; ++s) {
      dense.eval(std::min(r.tau * s / 32.0, dense.t_end()), &y);
      detail::unpack_state(y, red.dim, &xs, &ws);
      km = std::max(km, ev(xs, ws));
    }
    scores[i].kmu = km;
  });

  CurvatureReport rep;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].score > rep.k_sup) {
      rep.k_sup = scores[i].score;
      rep.worst_a = fan.nodes[i].a;
      rep.worst_theta = fan.nodes[i].theta;
    }
    rep.kmu_max = std::max(rep.kmu_max, scores[i].kmu);
  }
  rep.verifiable = rep.k_sup <= 4.0;
  return rep;
}

}  // namespace mpray
