#pragma once

// Second-order jets: value, gradient and symmetric Hessian of a scalar
// quantity with respect to the n base coordinates, propagated by forward-mode
// arithmetic.  This is what turns expression fields into exact Christoffel
// symbols, Lorentz tensors and curvature data.

#include <cmath>

#include "mpray/linalg.hpp"

namespace mpray {

struct Jet2 {
  int n = 0;
  double v = 0.0;
  Vec g;   // gradient
  Mat h;   // Hessian (kept symmetric)

  Jet2() = default;
  explicit Jet2(int dim) : n(dim), g(dim), h(dim) {}

  static Jet2 constant(int dim, double c) {
    Jet2 j(dim);
    j.v = c;
    return j;
  }

  static Jet2 variable(int dim, int index, double value) {
    Jet2 j(dim);
    j.v = value;
    j.g[index] = 1.0;
    return j;
  }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r(a.n);
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  r.h = a.h + b.h;
  return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r(a.n);
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  r.h = a.h - b.h;
  return r;
}

inline Jet2 operator-(const Jet2& a) {
  Jet2 r(a.n);
  r.v = -a.v;
  r.g = -a.g;
  r.h = -1.0 * a.h;
  return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.n);
  r.v = a.v * b.v;
  for (int i = 0; i < a.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j)
      r.h(i, j) = a.h(i, j) * b.v + a.v * b.h(i, j) + a.g[i] * b.g[j] + a.g[j] * b.g[i];
  return r;
}

inline Jet2 operator*(double c, const Jet2& a) {
  Jet2 r(a.n);
  r.v = c * a.v;
  r.g = c * a.g;
  r.h = c * a.h;
  return r;
}

inline Jet2 operator+(const Jet2& a, double c) {
  Jet2 r = a;
  r.v += c;
  return r;
}

// a / b; caller guarantees b.v != 0.
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  Jet2 r(a.n);
  r.v = a.v / b.v;
  for (int i = 0; i < a.n; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) / b.v;
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j)
      r.h(i, j) = (a.h(i, j) - r.v * b.h(i, j) - r.g[i] * b.g[j] - r.g[j] * b.g[i]) / b.v;
  return r;
}

// Composition with a smooth univariate u: jet of u(f) from u'(f), u''(f).
inline Jet2 compose(const Jet2& f, double u, double du, double ddu) {
  Jet2 r(f.n);
  r.v = u;
  r.g = du * f.g;
  for (int i = 0; i < f.n; ++i)
    for (int j = 0; j < f.n; ++j) r.h(i, j) = du * f.h(i, j) + ddu * f.g[i] * f.g[j];
  return r;
}

inline Jet2 sin(const Jet2& f) { return compose(f, std::sin(f.v), std::cos(f.v), -std::sin(f.v)); }
inline Jet2 cos(const Jet2& f) { return compose(f, std::cos(f.v), -std::sin(f.v), -std::cos(f.v)); }
inline Jet2 exp(const Jet2& f) {
  const double e = std::exp(f.v);
  return compose(f, e, e, e);
}
// Caller guarantees f.v > 0.
inline Jet2 log(const Jet2& f) { return compose(f, std::log(f.v), 1.0 / f.v, -1.0 / (f.v * f.v)); }
// Caller guarantees f.v > 0.
inline Jet2 sqrt(const Jet2& f) {
  const double s = std::sqrt(f.v);
  return compose(f, s, 0.5 / s, -0.25 / (s * f.v));
}
inline Jet2 tanh(const Jet2& f) {
  const double t = std::tanh(f.v);
  const double sech2 = 1.0 - t * t;
  return compose(f, t, sech2, -2.0 * t * sech2);
}

// Integer power by binary exponentiation on jets: exact at any base sign,
// including zero base with p >= 0 (0^0 := 1).  Caller handles p < 0 with
// zero base before calling.
inline Jet2 powi(const Jet2& f, long p) {
  if (p < 0) return Jet2::constant(f.n, 1.0) / powi(f, -p);
  Jet2 acc = Jet2::constant(f.n, 1.0);
  Jet2 base = f;
  unsigned long e = static_cast<unsigned long>(p);
  while (e > 0) {
    if (e & 1UL) acc = acc * base;
    base = base * base;
    e >>= 1UL;
  }
  return acc;
}

// Matching value-only integer power (same algorithm, so values agree bitwise
// with powi on jets).
inline double powi_value(double f, long p) {
  if (p < 0) return 1.0 / powi_value(f, -p);
  double acc = 1.0, base = f;
  unsigned long e = static_cast<unsigned long>(p);
  while (e > 0) {
    if (e & 1UL) acc *= base;
    base *= base;
    e >>= 1UL;
  }
  return acc;
}

}  // namespace mpray
