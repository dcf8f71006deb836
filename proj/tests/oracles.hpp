#pragma once

// Independent derivative oracles for tests: Richardson-extrapolated central
// differences acting on value-only callables.  These never touch the jet
// machinery, so they can sit in judgment over it.

#include <functional>

#include "mpray/linalg.hpp"

namespace mpray::testing {

using ScalarFn = std::function<double(const Vec&)>;

// d f / d x_i, O(h^4) after extrapolation.
inline double fd_partial(const ScalarFn& f, const Vec& x, int i, double h = 1e-3) {
  auto diff = [&](double hh) {
    Vec xp = x, xm = x;
    xp[i] += hh;
    xm[i] -= hh;
    return (f(xp) - f(xm)) / (2.0 * hh);
  };
  return (4.0 * diff(h / 2.0) - diff(h)) / 3.0;
}

// d^2 f / d x_i d x_j, O(h^4) after extrapolation.
inline double fd_second(const ScalarFn& f, const Vec& x, int i, int j, double h = 1e-3) {
  auto diff = [&](double hh) {
    Vec xpp = x, xpm = x, xmp = x, xmm = x;
    xpp[i] += hh; xpp[j] += hh;
    xpm[i] += hh; xpm[j] -= hh;
    xmp[i] -= hh; xmp[j] += hh;
    xmm[i] -= hh; xmm[j] -= hh;
    return (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hh * hh);
  };
  return (4.0 * diff(h / 2.0) - diff(h)) / 3.0;
}

}  // namespace mpray::testing
