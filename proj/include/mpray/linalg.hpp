#pragma once

// Dense linear algebra for runtime dimension n <= 3.  Everything is a small
// value type with fixed capacity; the active dimension travels with the
// object.  Plenty for coordinate-ball geometry in dimensions 2 and 3.

#include <array>
#include <cmath>
#include <cstdlib>

#include "mpray/error.hpp"

namespace mpray {

inline constexpr int kMaxDim = 3;

struct Vec {
  int n = 0;
  std::array<double, kMaxDim> a{};

  Vec() = default;
  explicit Vec(int dim) : n(dim) { a.fill(0.0); }
  Vec(double x, double y) : n(2), a{x, y, 0.0} {}
  Vec(double x, double y, double z) : n(3), a{x, y, z} {}

  double& operator[](int i) { return a[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return a[static_cast<std::size_t>(i)]; }
};

inline Vec operator+(const Vec& u, const Vec& v) {
  Vec r(u.n);
  for (int i = 0; i < u.n; ++i) r[i] = u[i] + v[i];
  return r;
}

inline Vec operator-(const Vec& u, const Vec& v) {
  Vec r(u.n);
  for (int i = 0; i < u.n; ++i) r[i] = u[i] - v[i];
  return r;
}

inline Vec operator-(const Vec& u) {
  Vec r(u.n);
  for (int i = 0; i < u.n; ++i) r[i] = -u[i];
  return r;
}

inline Vec operator*(double c, const Vec& u) {
  Vec r(u.n);
  for (int i = 0; i < u.n; ++i) r[i] = c * u[i];
  return r;
}

// Euclidean dot product and norm (metric-weighted versions live in geometry).
inline double dot(const Vec& u, const Vec& v) {
  double s = 0.0;
  for (int i = 0; i < u.n; ++i) s += u[i] * v[i];
  return s;
}

inline double norm(const Vec& u) { return std::sqrt(dot(u, u)); }

// Row-major n x n matrix.
struct Mat {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim> a{};

  Mat() = default;
  explicit Mat(int dim) : n(dim) { a.fill(0.0); }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Mat operator+(const Mat& A, const Mat& B) {
  Mat r(A.n);
  for (int i = 0; i < A.n * A.n; ++i) r.a[static_cast<std::size_t>(i)] =
      A.a[static_cast<std::size_t>(i)] + B.a[static_cast<std::size_t>(i)];
  return r;
}

inline Mat operator-(const Mat& A, const Mat& B) {
  Mat r(A.n);
  for (int i = 0; i < A.n * A.n; ++i) r.a[static_cast<std::size_t>(i)] =
      A.a[static_cast<std::size_t>(i)] - B.a[static_cast<std::size_t>(i)];
  return r;
}

inline Mat operator*(double c, const Mat& A) {
  Mat r(A.n);
  for (int i = 0; i < A.n * A.n; ++i) r.a[static_cast<std::size_t>(i)] =
      c * A.a[static_cast<std::size_t>(i)];
  return r;
}

inline Vec operator*(const Mat& A, const Vec& v) {
  Vec r(A.n);
  for (int i = 0; i < A.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < A.n; ++j) s += A(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

inline Mat operator*(const Mat& A, const Mat& B) {
  Mat r(A.n);
  for (int i = 0; i < A.n; ++i)
    for (int j = 0; j < A.n; ++j) {
      double s = 0.0;
      for (int k = 0; k < A.n; ++k) s += A(i, k) * B(k, j);
      r(i, j) = s;
    }
  return r;
}

inline Mat transpose(const Mat& A) {
  Mat r(A.n);
  for (int i = 0; i < A.n; ++i)
    for (int j = 0; j < A.n; ++j) r(i, j) = A(j, i);
  return r;
}

inline double det(const Mat& A) {
  switch (A.n) {
    case 1:
      return A(0, 0);
    case 2:
      return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    case 3:
      return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
             A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
             A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
    default:
      throw NumericalError("det: unsupported dimension");
  }
}

inline Mat inverse(const Mat& A) {
  const double d = det(A);
  if (!(std::abs(d) > 1e-300)) throw NumericalError("matrix is singular");
  Mat r(A.n);
  switch (A.n) {
    case 1:
      r(0, 0) = 1.0 / d;
      break;
    case 2:
      r(0, 0) = A(1, 1) / d;
      r(0, 1) = -A(0, 1) / d;
      r(1, 0) = -A(1, 0) / d;
      r(1, 1) = A(0, 0) / d;
      break;
    case 3:
      r(0, 0) = (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) / d;
      r(0, 1) = (A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2)) / d;
      r(0, 2) = (A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1)) / d;
      r(1, 0) = (A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2)) / d;
      r(1, 1) = (A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0)) / d;
      r(1, 2) = (A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2)) / d;
      r(2, 0) = (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0)) / d;
      r(2, 1) = (A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1)) / d;
      r(2, 2) = (A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0)) / d;
      break;
    default:
      throw NumericalError("inverse: unsupported dimension");
  }
  return r;
}

inline Vec solve(const Mat& A, const Vec& b) { return inverse(A) * b; }

// Smallest eigenvalue of a symmetric 1x1/2x2/3x3 matrix (SPD checks).
inline double min_eigenvalue_sym(const Mat& A) {
  switch (A.n) {
    case 1:
      return A(0, 0);
    case 2: {
      const double tr = A(0, 0) + A(1, 1);
      const double d = det(A);
      const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - d));
      return tr / 2.0 - disc;
    }
    case 3: {
      // Bisection on the characteristic polynomial; fine at this scale.
      auto charpoly = [&](double x) {
        Mat B = A;
        for (int i = 0; i < 3; ++i) B(i, i) -= x;
        return det(B);
      };
      double radius = 0.0;
      for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        for (int j = 0; j < 3; ++j) row += std::abs(A(i, j));
        radius = std::max(radius, row);
      }
      // All eigenvalues lie in [-radius, radius]; scan for the lowest root.
      double lo = -radius - 1.0, hi = radius + 1.0;
      const int kScan = 2048;
      double prev_x = lo, prev_f = charpoly(lo);
      for (int s = 1; s <= kScan; ++s) {
        const double x = lo + (hi - lo) * s / kScan;
        const double f = charpoly(x);
        if (prev_f == 0.0) return prev_x;
        if ((prev_f < 0.0) != (f < 0.0)) {
          double a = prev_x, b = x, fa = prev_f;
          for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = charpoly(m);
            if ((fa < 0.0) == (fm < 0.0)) {
              a = m;
              fa = fm;
            } else {
              b = m;
            }
          }
          return 0.5 * (a + b);
        }
        prev_x = x;
        prev_f = f;
      }
      throw NumericalError("min_eigenvalue_sym: root scan failed");
    }
    default:
      throw NumericalError("min_eigenvalue_sym: unsupported dimension");
  }
}

// Rank-3 array, e.g. Christoffel symbols G^i_{jk} or metric derivatives.
struct Ten3 {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> a{};

  Ten3() = default;
  explicit Ten3(int dim) : n(dim) { a.fill(0.0); }

  double& operator()(int i, int j, int k) {
    return a[static_cast<std::size_t>((i * n + j) * n + k)];
  }
  double operator()(int i, int j, int k) const {
    return a[static_cast<std::size_t>((i * n + j) * n + k)];
  }
};

// Rank-4 array, e.g. second metric derivatives d_k d_l g_{ij}.
struct Ten4 {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> a{};

  Ten4() = default;
  explicit Ten4(int dim) : n(dim) { a.fill(0.0); }

  double& operator()(int i, int j, int k, int l) {
    return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
  double operator()(int i, int j, int k, int l) const {
    return a[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

}  // namespace mpray
