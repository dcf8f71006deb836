#pragma once

// Dormand-Prince 5(4) integrator with FSAL, PI-free standard step control,
// fifth-order dense output, and event localization by bisection on the dense
// interpolant.  State vectors are plain std::vector<double>, so callers embed
// auxiliary quadrature components (ray-transform integrands, action terms,
// proper-time reparametrization) directly into the ODE state.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "mpray/error.hpp"

namespace mpray {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double t_max = 1e3;          // hard time cap
  double h_max = 0.0;          // 0 : no explicit bound beyond t_max
  long max_steps = 2000000;
  double event_tol = 1e-12;    // bisection window for event times
};

struct OdeResult {
  std::vector<double> y;  // state at the final time
  double t = 0.0;
  bool event = false;     // true if stopped by the event crossing
  long n_steps = 0;
  long n_rejected = 0;
};

// One accepted step's dense-output polynomial.
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::vector<double> r1, r2, r3, r4, r5;

  void eval(double t, std::vector<double>* out) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    const std::size_t n = r1.size();
    out->resize(n);
    for (std::size_t i = 0; i < n; ++i)
      (*out)[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
  }
};

// Piecewise dense output over all accepted steps.
class DenseOutput {
 public:
  void clear() { segs_.clear(); }
  void add(DenseSegment seg) { segs_.push_back(std::move(seg)); }
  bool empty() const { return segs_.empty(); }
  double t_begin() const { return segs_.front().t0; }
  double t_end() const { return segs_.back().t0 + segs_.back().h; }

  void eval(double t, std::vector<double>* out) const {
    if (segs_.empty()) throw NumericalError("dense output is empty");
    // Binary search for the segment containing t (clamped to the range).
    std::size_t lo = 0, hi = segs_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (segs_[mid].t0 + segs_[mid].h < t)
        lo = mid + 1;
      else
        hi = mid;
    }
    segs_[lo].eval(t, out);
  }
  std::vector<double> eval(double t) const {
    std::vector<double> out;
    eval(t, &out);
    return out;
  }

 private:
  std::vector<DenseSegment> segs_;
};

namespace dp54 {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// b - bhat (embedded 4th-order error coefficients)
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output coefficients.
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

}  // namespace dp54

namespace detail {

// Classic DOPRI5 automatic initial step selection.
template <typename Rhs>
double initial_step(const Rhs& rhs, const std::vector<double>& y0,
                    const std::vector<double>& f0, const OdeOptions& opt) {
  const std::size_t n = y0.size();
  double d0 = 0.0, d1n = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = opt.atol + opt.rtol * std::abs(y0[i]);
    d0 += (y0[i] / sk) * (y0[i] / sk);
    d1n += (f0[i] / sk) * (f0[i] / sk);
  }
  d0 = std::sqrt(d0 / static_cast<double>(n));
  d1n = std::sqrt(d1n / static_cast<double>(n));
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, opt.t_max);
  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
  rhs(h0, y1.data(), f1.data());
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = opt.atol + opt.rtol * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  d2 = std::sqrt(d2 / static_cast<double>(n)) / h0;
  double h1;
  const double dm = std::max(d1n, d2);
  if (dm <= 1e-15)
    h1 = std::max(1e-6, h0 * 1e-3);
  else
    h1 = std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, opt.t_max});
}

}  // namespace detail

// Integrates y' = rhs(t, y) from t = 0.  Stops at t_end (<= opt.t_max).
// If `event` is provided, also stops at the first time where event(t, y)
// crosses from >= 0 to < 0; the crossing is localized on the dense output.
// If `dense` is non-null, every accepted step's interpolant is recorded.
//
// rhs:   void(double t, const double* y, double* dydt)
// event: double(double t, const std::vector<double>& y)
template <typename Rhs>
OdeResult dp54_integrate(const Rhs& rhs, std::vector<double> y0, double t_end,
                         const OdeOptions& opt = {},
                         const std::function<double(double, const std::vector<double>&)>& event =
                             nullptr,
                         DenseOutput* dense = nullptr) {
  using namespace dp54;
  const std::size_t n = y0.size();
  if (n == 0) throw NumericalError("empty ODE state");
  if (!(t_end > 0.0)) {
    OdeResult res;
    res.y = std::move(y0);
    res.t = 0.0;
    return res;
  }
  if (dense) dense->clear();

  std::vector<double> y = std::move(y0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  std::vector<double> scratch;

  double t = 0.0;
  rhs(t, y.data(), k1.data());
  double g_prev = event ? event(t, y) : 1.0;

  OdeResult res;
  double h = detail::initial_step(rhs, y, k1, opt);
  if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
  bool rejected_last = false;

  while (t < t_end) {
    if (res.n_steps + res.n_rejected >= opt.max_steps)
      throw NumericalError("ODE step limit exceeded");
    if (!(h > std::abs(t) * 1e-14 + 1e-300))
      throw NumericalError("ODE step size underflow");
    if (t + h > t_end) h = t_end - t;

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp.data(), k2.data());
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp.data(), k3.data());
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp.data(), k4.data());
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp.data(), k5.data());
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] =
          y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp.data(), k6.data());
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(t + h, ynew.data(), k7.data());

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ee =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (ee / sk) * (ee / sk);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err > 1.0) {
      ++res.n_rejected;
      const double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h *= std::min(fac, 1.0);
      rejected_last = true;
      continue;
    }

    // Accepted: build the dense interpolant for this step.
    DenseSegment seg;
    seg.t0 = t;
    seg.h = h;
    seg.r1.resize(n);
    seg.r2.resize(n);
    seg.r3.resize(n);
    seg.r4.resize(n);
    seg.r5.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      seg.r1[i] = y[i];
      seg.r2[i] = ydiff;
      seg.r3[i] = bspl;
      seg.r4[i] = ydiff - h * k7[i] - bspl;
      seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                       d7 * k7[i]);
    }

    const double t_new = t + h;
    if (event) {
      // Detect a crossing at the endpoint or at interior subsamples (guards
      // against a dip below zero inside one long step).
      double t_hi = -1.0, g_lo_t = t;
      double g_lo = g_prev;
      for (int s = 1; s <= 4; ++s) {
        const double ts = t + h * (0.25 * s);
        double gs;
        if (s == 4) {
          gs = event(t_new, ynew);
        } else {
          seg.eval(ts, &scratch);
          gs = event(ts, scratch);
        }
        if (g_lo >= 0.0 && gs < 0.0) {
          t_hi = ts;
          break;
        }
        g_lo = gs;
        g_lo_t = ts;
      }
      if (t_hi >= 0.0) {
        double lo = g_lo_t, hi = t_hi;
        for (int it = 0; it < 200 && (hi - lo) > opt.event_tol; ++it) {
          const double mid = 0.5 * (lo + hi);
          seg.eval(mid, &scratch);
          if (event(mid, scratch) < 0.0)
            hi = mid;
          else
            lo = mid;
        }
        seg.eval(hi, &scratch);
        if (dense) {
          DenseSegment cut = seg;  // keep the full polynomial; domain noted by h
          dense->add(std::move(cut));
        }
        res.y = scratch;
        res.t = hi;
        res.event = true;
        ++res.n_steps;
        return res;
      }
      g_prev = g_lo;
    }

    if (dense) dense->add(seg);
    ++res.n_steps;
    t = t_new;
    y.swap(ynew);
    k1.swap(k7);  // FSAL

    double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
    fac = std::min(rejected_last ? 1.0 : 10.0, std::max(0.2, fac));
    rejected_last = false;
    h *= fac;
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
  }

  res.y = std::move(y);
  res.t = t;
  return res;
}

}  // namespace mpray
