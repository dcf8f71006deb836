#pragma once

// Jacobi-Maupertuis reduction: an MP-system (g, alpha, U) at energy k with
// k > max U is trajectory-equivalent to the purely magnetic system with
// metric G = P g (P = 2(k - U)), the same magnetic form, no potential, at
// energy 1/2.  The MP-geodesic sigma(t) and the unit-G-speed magnetic
// geodesic gamma(s) with gamma(0) = sigma(0), gamma'(0) = sigma'(0)/P
// satisfy sigma(t) = gamma(s(t)) with s(t) = int_0^t P(sigma(u)) du and
// sigma'(t) = P gamma'(s(t)).

#include <cmath>
#include <utility>
#include <vector>

#include "mpray/flow.hpp"
#include "mpray/system.hpp"

namespace mpray {

// The reduced magnetic system as an MP-system: metric P g, same 1-form,
// zero potential, energy 1/2 (so unit G-speed on the energy sphere).
inline MPSystem reduce(const MPSystem& sys) {
  return make_system(scale_metric(sys.P, sys.g), sys.alpha, make_constant_field(sys.dim, 0.0),
                     0.5, sys.R, sys.name.empty() ? "reduced" : sys.name + "-G");
}

// Acceleration of the reduced (magnetic) flow; provided as a named entry
// point so callers can integrate the magnetic side without building the
// reduced system themselves.
inline Vec magnetic_acceleration(const MPSystem& reduced, const Vec& x, const Vec& v) {
  return mp_acceleration(reduced, x, v);
}

// ---------------------------------------------------------------------------
// Time reparametrization t <-> s along one MP-ray.  The running integral
// s(t) = int P dt rides along the ray as an extra ODE component, so both the
// states and the map share the integrator's dense output.

class ReparamMap {
 public:
  ReparamMap(DenseOutput dense, int dim, double tau)
      : dense_(std::move(dense)), dim_(dim), tau_(tau) {
    s_total_ = s_of_t(tau_);
  }

  double tau() const { return tau_; }       // total t-time
  double s_total() const { return s_total_; }  // total s-time = G-length

  double s_of_t(double t) const {
    dense_.eval(clamp_t(t), &scratch_);
    return scratch_[static_cast<std::size_t>(2 * dim_)];
  }

  // Inverse of the strictly increasing s(t) by bisection.
  double t_of_s(double s) const {
    double lo = 0.0, hi = tau_;
    if (s <= 0.0) return 0.0;
    if (s >= s_total_) return tau_;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, tau_); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (s_of_t(mid) < s)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  // MP-state at time t.
  void state(double t, Vec* x, Vec* v) const {
    dense_.eval(clamp_t(t), &scratch_);
    detail::unpack_state(scratch_, dim_, x, v);
  }

 private:
  double clamp_t(double t) const {
    if (dense_.empty()) return t;
    return std::min(std::max(t, 0.0), dense_.t_end());
  }

  DenseOutput dense_;
  int dim_;
  double tau_ = 0.0, s_total_ = 0.0;
  mutable std::vector<double> scratch_;
};

// Integrates the ray from (x0, v0) to the boundary and returns the t <-> s
// correspondence along it.
inline ReparamMap reparametrize(const MPSystem& sys, const Vec& x0, const Vec& v0,
                                const RayOptions& opt = {}) {
  std::vector<Integrand> fns;
  fns.push_back([&sys](const Vec& x, const Vec&) { return sys.p(x); });
  DenseOutput dense;
  const RayResult r = integrate_ray(sys, x0, v0, fns, opt, &dense);
  return ReparamMap(std::move(dense), sys.dim, r.tau);
}

// ---------------------------------------------------------------------------
// Two-solver correspondence: integrate the MP-ray and, independently, the
// reduced magnetic ray, and measure the worst mismatch of
// sigma(t) vs gamma(s(t)) and sigma'(t) vs P gamma'(s(t)) at checkpoints.

struct CorrespondenceReport {
  double max_pos_err = 0.0;
  double max_vel_err = 0.0;
  double tau_mp = 0.0;    // MP exit time
  double s_total = 0.0;   // int_0^tau P dt
  double tau_mag = 0.0;   // exit time of the reduced ray (should equal s_total)
};

inline CorrespondenceReport correspondence_check(const MPSystem& sys, const Vec& x0,
                                                 const Vec& v0, int n_checkpoints = 20,
                                                 const RayOptions& opt = {}) {
  const int n = sys.dim;
  const ReparamMap map = reparametrize(sys, x0, v0, opt);
  const MPSystem red = reduce(sys);

  const double p0 = sys.p(x0);
  DenseOutput mag_dense;
  const Vec w0 = (1.0 / p0) * v0;
  const RayResult mag = integrate_ray(red, x0, w0, {}, opt, &mag_dense);

  CorrespondenceReport rep;
  rep.tau_mp = map.tau();
  rep.s_total = map.s_total();
  rep.tau_mag = mag.tau;

  std::vector<double> ybuf;
  for (int c = 0; c <= n_checkpoints; ++c) {
    const double t = map.tau() * c / n_checkpoints;
    Vec xs, vs;
    map.state(t, &xs, &vs);
    const double s = std::min(map.s_of_t(t), mag_dense.t_end());
    mag_dense.eval(s, &ybuf);
    Vec xg, wg;
    detail::unpack_state(ybuf, n, &xg, &wg);
    rep.max_pos_err = std::max(rep.max_pos_err, norm(xs - xg));
    const double p = sys.p(xs);
    rep.max_vel_err = std::max(rep.max_vel_err, norm(vs - p * wg));
  }
  return rep;
}

}  // namespace mpray
