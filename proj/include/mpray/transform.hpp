#pragma once

// The MP-ray transform on tensor triples f = [h, beta, V]:
//   I f (x, v) = int_0^tau { h_ij sigma'^i sigma'^j + beta_i sigma'^i + V } dt
// along the MP-ray from (x, v), together with the algebra connecting it to
// the magnetic ray transform of the reduced system:
//   Phi[h, beta, V] = [P h + g V, beta],    I f = I_M(Phi f) degree-shifted
// through (x, v) -> (x, v / P) (the reduction identity), the Phi-preimage
// [h / P, beta, 0], and the kernel generators [-eta g, 0, eta P] on which I
// vanishes identically.  Also: the L^2 boundedness estimate of the transform
// via the fan and phase quadratures.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mpray/error.hpp"
#include "mpray/field.hpp"
#include "mpray/flow.hpp"
#include "mpray/measures.hpp"
#include "mpray/reduction.hpp"
#include "mpray/rng.hpp"
#include "mpray/system.hpp"

namespace mpray {

struct TripleValue {
  Mat h;
  Vec beta;
  double V = 0.0;
};

struct PairValue {
  Mat h;
  Vec beta;
};

// A symmetric 2-tensor + 1-form + function triple.  Field-backed triples
// expose their component fields (with jets); derived triples carry only a
// pointwise evaluator.
class TensorTriple {
 public:
  TensorTriple(SymTensorField h, CovectorField beta, ScalarFieldPtr V)
      : dim_(h.dim), field_backed_(true), h_(std::move(h)), beta_(std::move(beta)),
        V_(std::move(V)) {}

  static TensorTriple from_function(int dim, std::function<TripleValue(const Vec&)> fn) {
    TensorTriple t;
    t.dim_ = dim;
    t.field_backed_ = false;
    t.fn_ = std::move(fn);
    return t;
  }

  static TensorTriple zero(int dim) {
    return TensorTriple(SymTensorField::zero(dim), CovectorField::zero(dim),
                        make_constant_field(dim, 0.0));
  }

  int dim() const { return dim_; }
  bool field_backed() const { return field_backed_; }

  TripleValue value(const Vec& x) const {
    if (!field_backed_) return fn_(x);
    TripleValue out;
    out.h = h_.value(x);
    out.beta = beta_.value(x);
    out.V = V_->value(x);
    return out;
  }

  const SymTensorField& h() const {
    require_fields();
    return h_;
  }
  const CovectorField& beta() const {
    require_fields();
    return beta_;
  }
  const ScalarFieldPtr& V() const {
    require_fields();
    return V_;
  }

 private:
  TensorTriple() = default;
  void require_fields() const {
    if (!field_backed_) throw Error("triple is function-backed; component fields unavailable");
  }

  int dim_ = 0;
  bool field_backed_ = false;
  SymTensorField h_;
  CovectorField beta_;
  ScalarFieldPtr V_;
  std::function<TripleValue(const Vec&)> fn_;
};

// A symmetric 2-tensor + 1-form pair (data of the magnetic transform).
class MagneticPair {
 public:
  MagneticPair(SymTensorField h, CovectorField beta)
      : dim_(h.dim), field_backed_(true), h_(std::move(h)), beta_(std::move(beta)) {}

  static MagneticPair from_function(int dim, std::function<PairValue(const Vec&)> fn) {
    MagneticPair p;
    p.dim_ = dim;
    p.field_backed_ = false;
    p.fn_ = std::move(fn);
    return p;
  }

  int dim() const { return dim_; }
  bool field_backed() const { return field_backed_; }

  PairValue value(const Vec& x) const {
    if (!field_backed_) return fn_(x);
    PairValue out;
    out.h = h_.value(x);
    out.beta = beta_.value(x);
    return out;
  }

 private:
  MagneticPair() = default;
  int dim_ = 0;
  bool field_backed_ = false;
  SymTensorField h_;
  CovectorField beta_;
  std::function<PairValue(const Vec&)> fn_;
};

// ---------------------------------------------------------------------------
// Ray transforms.

inline Integrand transform_integrand(const TensorTriple& f) {
  return [f](const Vec& x, const Vec& v) {
    const TripleValue t = f.value(x);
    return dot(v, t.h * v) + dot(t.beta, v) + t.V;
  };
}

inline Integrand transform_integrand(const MagneticPair& f) {
  return [f](const Vec& x, const Vec& v) {
    const PairValue t = f.value(x);
    return dot(v, t.h * v) + dot(t.beta, v);
  };
}

// I f (x0, v0) along the MP-ray to the boundary.
inline double mp_ray(const MPSystem& sys, const TensorTriple& f, const Vec& x0, const Vec& v0,
                     const RayOptions& opt = {}) {
  const RayResult r = integrate_ray(sys, x0, v0, {transform_integrand(f)}, opt);
  return r.integrals[0];
}

// I_M f (x0, w0) along the magnetic ray of the REDUCED system.
inline double magnetic_ray(const MPSystem& reduced, const MagneticPair& f, const Vec& x0,
                           const Vec& w0, const RayOptions& opt = {}) {
  const RayResult r = integrate_ray(reduced, x0, w0, {transform_integrand(f)}, opt);
  return r.integrals[0];
}

// ---------------------------------------------------------------------------
// The Phi algebra.

// Phi[h, beta, V] = [P h + g V, beta].
inline MagneticPair phi_map(const MPSystem& sys, const TensorTriple& f) {
  const MPSystem* s = &sys;
  return MagneticPair::from_function(sys.dim, [s, f](const Vec& x) {
    const TripleValue t = f.value(x);
    const double p = s->p(x);
    const Mat g = s->g.value(x);
    PairValue out;
    out.h = p * t.h + t.V * g;
    out.beta = t.beta;
    return out;
  });
}

// A right inverse: Phi[h / P, beta, 0] = [h, beta].
inline TensorTriple phi_preimage(const MPSystem& sys, const MagneticPair& f) {
  const MPSystem* s = &sys;
  return TensorTriple::from_function(sys.dim, [s, f](const Vec& x) {
    const PairValue t = f.value(x);
    TripleValue out;
    out.h = (1.0 / s->p(x)) * t.h;
    out.beta = t.beta;
    out.V = 0.0;
    return out;
  });
}

// Kernel generator of Phi (and of I): [-eta g, 0, eta P], field-backed so
// derivative-based identities can consume it too.
inline TensorTriple kernel_generator(const MPSystem& sys, const ScalarFieldPtr& eta) {
  const int n = sys.dim;
  SymTensorField h;
  h.dim = n;
  ScalarFieldPtr neg_eta = std::make_shared<AffineField>(0.0, -1.0, eta);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      h.comp[static_cast<std::size_t>(sym_slot(i, j))] =
          std::make_shared<ProductField>(neg_eta, metric_component(sys.g, i, j));
  ScalarFieldPtr V = std::make_shared<ProductField>(eta, sys.P);
  return TensorTriple(std::move(h), CovectorField::zero(n), std::move(V));
}

// |I f (x, v) - I_M (Phi f)(x, v / P(x))| : the reduction identity residual.
inline double reduction_identity_residual(const MPSystem& sys, const MPSystem& reduced,
                                          const TensorTriple& f, const Vec& x0, const Vec& v0,
                                          const RayOptions& opt = {}) {
  const double lhs = mp_ray(sys, f, x0, v0, opt);
  const Vec w0 = (1.0 / sys.p(x0)) * v0;
  const double rhs = magnetic_ray(reduced, phi_map(sys, f), x0, w0, opt);
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Norms and the L^2 boundedness estimate.

// ||f||_{L^2(M)}^2 = int_M ( |h|_g^2 + |beta|_g^2 + V^2 ) dVol_g.
inline double triple_l2_norm(const MPSystem& sys, const TensorTriple& f,
                             const QuadratureSpec& spec = {}, int threads = 1) {
  const double sq = volume_integral(
      sys,
      [&](const Vec& x) {
        const TripleValue t = f.value(x);
        const Mat ginv = inverse(sys.g.value(x));
        double h2 = 0.0;
        for (int i = 0; i < sys.dim; ++i)
          for (int j = 0; j < sys.dim; ++j)
            for (int a = 0; a < sys.dim; ++a)
              for (int b = 0; b < sys.dim; ++b)
                h2 += ginv(i, a) * ginv(j, b) * t.h(i, j) * t.h(a, b);
        const double b2 = dot(t.beta, ginv * t.beta);
        return h2 + b2 + t.V * t.V;
      },
      spec, threads);
  return std::sqrt(sq);
}

struct BoundednessReport {
  double lhs = 0.0;     // ||I f||^2 over the inward boundary, d mu_k
  double rhs = 0.0;     // C_tilde * int_{S^k M} f(x, v)^2 dSigma
  double c_tau = 0.0;   // max exit time over the fan
  double c_tilde = 0.0; // c_tau * max sqrt(P)
  bool holds = false;   // strict lhs < rhs
};

inline BoundednessReport boundedness_check(const MPSystem& sys, const TensorTriple& f,
                                           const QuadratureSpec& spec = {}, int threads = 1,
                                           const RayOptions& opt = {}) {
  const Integrand fi = transform_integrand(f);
  const BoundaryFan fan = boundary_fan(sys, spec);

  std::vector<double> vals(fan.nodes.size()), taus(fan.nodes.size());
  parallel_for(fan.nodes.size(), threads, [&](std::size_t i) {
    const FanNode& nd = fan.nodes[i];
    const RayResult r = integrate_ray(sys, nd.x, nd.v, {fi}, opt);
    vals[i] = r.integrals[0];
    taus[i] = r.tau;
  });

  BoundednessReport rep;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    rep.lhs += vals[i] * vals[i] * fan.nodes[i].weight;
    rep.c_tau = std::max(rep.c_tau, taus[i]);
  }
  rep.c_tilde = rep.c_tau * std::sqrt(sys.stats.max_p);
  const double phase =
      phase_integral(sys, [&](const Vec& x, const Vec& v) {
        const double s = fi(x, v);
        return s * s;
      }, spec, threads);
  rep.rhs = rep.c_tilde * phase;
  rep.holds = rep.lhs < rep.rhs;
  return rep;
}

// ---------------------------------------------------------------------------
// Sinogram: I f on a uniform grid of boundary angles x direction angles
// (2D systems).

struct Sinogram {
  std::vector<double> a;       // boundary angles
  std::vector<double> theta;   // direction angles in (-pi/2, pi/2)
  std::vector<std::vector<double>> values;  // [ia][itheta]
};

inline Sinogram sinogram(const MPSystem& sys, const TensorTriple& f, int n_a, int n_theta,
                         int threads = 1, const RayOptions& opt = {}) {
  if (sys.dim != 2) throw ConfigError("sinogram requires a 2D system");
  if (n_a < 1 || n_theta < 1) throw ConfigError("sinogram grid must be positive");
  Sinogram sg;
  for (int i = 0; i < n_a; ++i) sg.a.push_back(2.0 * M_PI * i / n_a);
  for (int j = 0; j < n_theta; ++j)
    sg.theta.push_back(-0.5 * M_PI + M_PI * (j + 0.5) / n_theta);
  sg.values.assign(static_cast<std::size_t>(n_a),
                   std::vector<double>(static_cast<std::size_t>(n_theta), 0.0));
  const Integrand fi = transform_integrand(f);
  parallel_for(static_cast<std::size_t>(n_a) * n_theta, threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / n_theta;
    const int j = static_cast<int>(idx) % n_theta;
    const Vec x = boundary_point_2d(sys, sg.a[static_cast<std::size_t>(i)]);
    const Vec v = boundary_vector_2d(sys, x, sg.theta[static_cast<std::size_t>(j)]);
    const RayResult r = integrate_ray(sys, x, v, {fi}, opt);
    sg.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r.integrals[0];
  });
  return sg;
}

// ---------------------------------------------------------------------------
// Seeded polynomial triples (field-backed, exact jets).

// Random polynomial of total degree <= deg with coefficients in [-amp, amp].
// Monomials are enumerated in a fixed order, one coefficient draw each.
inline std::string random_polynomial(int dim, int deg, double amp, Rng* rng) {
  std::string out;
  auto append_term = [&](int e1, int e2, int e3) {
    const double c = rng->uniform(-amp, amp);
    std::string term = num_str(c);
    if (e1 > 0) term += "*x1" + (e1 > 1 ? "^" + std::to_string(e1) : std::string());
    if (e2 > 0) term += "*x2" + (e2 > 1 ? "^" + std::to_string(e2) : std::string());
    if (e3 > 0) term += "*x3" + (e3 > 1 ? "^" + std::to_string(e3) : std::string());
    if (!out.empty()) out += "+";
    out += "(" + term + ")";
  };
  for (int e1 = 0; e1 <= deg; ++e1)
    for (int e2 = 0; e1 + e2 <= deg; ++e2) {
      if (dim == 2) {
        append_term(e1, e2, 0);
      } else {
        for (int e3 = 0; e1 + e2 + e3 <= deg; ++e3) append_term(e1, e2, e3);
      }
    }
  return out;
}

// Field-backed random triple: polynomial h (symmetric), beta, and V.
inline TensorTriple random_polynomial_triple(const MPSystem& sys, int deg, double amp,
                                             Rng* rng) {
  const int n = sys.dim;
  SymTensorField h;
  h.dim = n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      h.comp[static_cast<std::size_t>(sym_slot(i, j))] =
          make_expr_field(random_polynomial(n, deg, amp, rng), n);
  CovectorField beta;
  beta.dim = n;
  for (int i = 0; i < n; ++i)
    beta.comp[static_cast<std::size_t>(i)] =
        make_expr_field(random_polynomial(n, deg, amp, rng), n);
  ScalarFieldPtr V = make_expr_field(random_polynomial(n, deg, amp, rng), n);
  return TensorTriple(std::move(h), std::move(beta), std::move(V));
}

}  // namespace mpray
