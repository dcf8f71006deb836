#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mpray/field.hpp"
#include "mpray/geometry.hpp"
#include "mpray/system.hpp"
#include "oracles.hpp"

using namespace mpray;
using mpray::testing::fd_partial;

namespace {

// A 2D metric with all components varying, for oracle comparisons.
MetricField make_general_metric() {
  std::array<ScalarFieldPtr, 6> comps{};
  comps[static_cast<std::size_t>(sym_slot(0, 0))] = make_expr_field("1+0.1*x1^2", 2);
  comps[static_cast<std::size_t>(sym_slot(0, 1))] = make_expr_field("0.05*x1*x2", 2);
  comps[static_cast<std::size_t>(sym_slot(1, 1))] = make_expr_field("1+0.1*x2^2+0.05*x1", 2);
  return MetricField::general(2, comps);
}

// Curved magnetic system with potential (nonzero everything).
MPSystem make_curved_system() {
  ScalarFieldPtr factor = make_expr_field("1+0.1*(x1^2+x2^2)", 2);
  CovectorField alpha = CovectorField::from_exprs(
      2, {"-(0.1*x2)*(1+0.05*x1)", "0.1*x1*(1+0.05*x1)", ""});
  ScalarFieldPtr U = make_expr_field("0.05*(x1^2+2*x2^2)", 2);
  return make_system(MetricField::conformal(factor), alpha, U, 0.5, 1.0, "curved");
}

double metric_entry(const MetricField& m, const Vec& x, int i, int j) {
  return m.value(x)(i, j);
}

}  // namespace

TEST_CASE("christoffel symbols match finite differences of the metric") {
  const MetricField m = make_general_metric();
  const Vec pts[] = {Vec(0.3, -0.2), Vec(0.0, 0.0), Vec(-0.6, 0.5), Vec(0.1, 0.7)};
  for (const Vec& x : pts) {
    const ChristoffelData cd = christoffel(m, x);
    // Oracle: Gamma^i_{jk} = (1/2) g^{il} (d_j g_lk + d_k g_jl - d_l g_jk)
    // with all metric derivatives from central differences of values.
    const Mat ginv = inverse(m.value(x));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double s = 0.0;
          for (int l = 0; l < 2; ++l) {
            const double d1 = fd_partial([&](const Vec& z) { return metric_entry(m, z, l, k); }, x, j);
            const double d2 = fd_partial([&](const Vec& z) { return metric_entry(m, z, j, l); }, x, k);
            const double d3 = fd_partial([&](const Vec& z) { return metric_entry(m, z, j, k); }, x, l);
            s += ginv(i, l) * (d1 + d2 - d3);
          }
          REQUIRE(cd.gamma(i, j, k) == Catch::Approx(0.5 * s).margin(1e-8));
        }
  }
}

TEST_CASE("christoffel derivatives match finite differences of christoffel") {
  const MetricField m = make_general_metric();
  const Vec x(0.25, -0.4);
  const ChristoffelDerivs cd = christoffel_with_derivs(m, x);
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const double fd = fd_partial(
              [&](const Vec& z) { return christoffel(m, z).gamma(i, j, k); }, x, l);
          REQUIRE(cd.dgamma(l, i, j, k) == Catch::Approx(fd).margin(1e-6));
        }
}

TEST_CASE("conformal christoffel symbols in closed form") {
  // g = exp(2 phi) delta with phi = lam |x|^2:
  // Gamma^k_{ij} = delta^k_i d_j phi + delta^k_j d_i phi - delta_ij d_k phi.
  const double lam = 0.05;
  ScalarFieldPtr factor = make_expr_field("exp(0.1*(x1^2+x2^2))", 2);
  const MetricField m = MetricField::conformal(factor);
  const Vec x(0.3, -0.2);
  const double dphi1 = 2.0 * lam * x[0], dphi2 = 2.0 * lam * x[1];
  const ChristoffelData cd = christoffel(m, x);
  REQUIRE(cd.gamma(0, 0, 0) == Catch::Approx(dphi1).margin(1e-14));
  REQUIRE(cd.gamma(0, 0, 1) == Catch::Approx(dphi2).margin(1e-14));
  REQUIRE(cd.gamma(0, 1, 1) == Catch::Approx(-dphi1).margin(1e-14));
  REQUIRE(cd.gamma(1, 0, 0) == Catch::Approx(-dphi2).margin(1e-14));
  REQUIRE(cd.gamma(1, 0, 1) == Catch::Approx(dphi1).margin(1e-14));
  REQUIRE(cd.gamma(1, 1, 1) == Catch::Approx(dphi2).margin(1e-14));
}

TEST_CASE("lorentz operator of the constant-field system") {
  const MPSystem sys = make_sys_b(0.2);
  const Vec x(0.3, 0.4);
  const Mat y = lorentz_matrix(sys, x);
  // Y(v) = B(-v^2, v^1)
  REQUIRE(y(0, 0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(y(0, 1) == Catch::Approx(-0.2).margin(1e-15));
  REQUIRE(y(1, 0) == Catch::Approx(0.2).margin(1e-15));
  REQUIRE(y(1, 1) == Catch::Approx(0.0).margin(1e-15));
  const Vec v(0.7, -0.5);
  const Vec yv = lorentz_apply(sys, x, v);
  REQUIRE(yv[0] == Catch::Approx(0.2 * 0.5).margin(1e-15));
  REQUIRE(yv[1] == Catch::Approx(0.2 * 0.7).margin(1e-15));
}

TEST_CASE("lorentz operator is g-antisymmetric and covector action is compatible") {
  const MPSystem sys = make_curved_system();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-0.65, 0.65);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec x(unif(rng), unif(rng));
    const Vec v(unif(rng), unif(rng));
    const Vec w(unif(rng), unif(rng));
    const Mat g = sys.g.value(x);
    const Mat y = lorentz_matrix(sys, x);
    REQUIRE(dot(y * v, g * w) + dot(v, g * (y * w)) == Catch::Approx(0.0).margin(1e-12));
    // (Y u)_i = -Y^j_i u_j equals (Y(u^sharp))^flat.
    const Vec u = g * v;  // v^flat
    const Vec yu = covector_lorentz(y, u);
    const Vec yv_flat = g * (y * v);
    for (int i = 0; i < 2; ++i) REQUIRE(yu[i] == Catch::Approx(yv_flat[i]).margin(1e-12));
  }
}

TEST_CASE("lorentz derivative matches finite differences and is g-antisymmetric") {
  const MPSystem sys = make_curved_system();
  const Vec x(0.2, -0.35);
  const LorentzDerivs ld = lorentz_with_derivs(sys, x);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double fd =
            fd_partial([&](const Vec& z) { return lorentz_matrix(sys, z)(i, j); }, x, k);
        REQUIRE(ld.dy(k, i, j) == Catch::Approx(fd).margin(1e-8));
      }
  // Covariant derivative inherits g-antisymmetry (nabla g = 0):
  // g_il (nabla_k Y)^l_j + g_jl (nabla_k Y)^l_i = 0.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-0.65, 0.65);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec z(unif(rng), unif(rng));
    const Mat g = sys.g.value(z);
    const Ten3 ny = lorentz_covariant_derivs(sys, z);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double s = 0.0;
          for (int l = 0; l < 2; ++l) s += g(i, l) * ny(k, l, j) + g(j, l) * ny(k, l, i);
          REQUIRE(s == Catch::Approx(0.0).margin(1e-9));
        }
  }
}

TEST_CASE("sectional curvature of model conformal metrics") {
  // Stereographic metric of the unit sphere: 4/(1+|x|^2)^2, K = +1.
  ScalarFieldPtr sph = make_expr_field("4/(1+x1^2+x2^2)^2", 2);
  const MetricField msph = MetricField::conformal(sph);
  for (const Vec& x : {Vec(0.0, 0.0), Vec(0.3, 0.4), Vec(-0.7, 0.2)}) {
    REQUIRE(sectional_curvature(msph, x, Vec(1.0, 0.0), Vec(0.0, 1.0)) ==
            Catch::Approx(1.0).margin(1e-10));
  }
  // Poincare disc metric: 4/(1-|x|^2)^2, K = -1.
  ScalarFieldPtr hyp = make_expr_field("4/(1-(x1^2+x2^2))^2", 2);
  const MetricField mhyp = MetricField::conformal(hyp);
  for (const Vec& x : {Vec(0.3, -0.2), Vec(0.0, 0.5)}) {
    REQUIRE(sectional_curvature(mhyp, x, Vec(1.0, 0.0), Vec(0.0, 1.0)) ==
            Catch::Approx(-1.0).margin(1e-10));
  }
  // Sectional curvature is independent of the basis of the plane.
  REQUIRE(sectional_curvature(mhyp, Vec(0.3, -0.2), Vec(1.0, 2.0), Vec(-0.5, 1.0)) ==
          Catch::Approx(-1.0).margin(1e-10));
}

TEST_CASE("sectional curvature in dimension three") {
  // Stereographic metric of S^3: all sectional curvatures +1.
  ScalarFieldPtr sph = make_expr_field("4/(1+x1^2+x2^2+x3^2)^2", 3);
  const MetricField m = MetricField::conformal(sph);
  const Vec x(0.2, -0.3, 0.4);
  REQUIRE(sectional_curvature(m, x, Vec(1, 0, 0), Vec(0, 1, 0)) ==
          Catch::Approx(1.0).margin(1e-10));
  REQUIRE(sectional_curvature(m, x, Vec(0, 1, 0), Vec(0, 0, 1)) ==
          Catch::Approx(1.0).margin(1e-10));
  REQUIRE(sectional_curvature(m, x, Vec(1, 1, 0), Vec(0, 1, 1)) ==
          Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("divergence of a 1-form matches the flux formula") {
  const MetricField m = make_general_metric();
  CovectorField u = CovectorField::from_exprs(2, {"x1^2*x2+0.3*x2", "sin(x1)+x2^2", ""});
  const Vec pts[] = {Vec(0.3, -0.2), Vec(-0.4, 0.45)};
  for (const Vec& x : pts) {
    // Oracle: delta u = div(u^sharp) = (1/sqrt(det g)) d_i (sqrt(det g) g^{ij} u_j),
    // assembled purely from field values and finite differences.
    auto flux_component = [&](const Vec& z, int i) {
      const Mat g = m.value(z);
      const Mat ginv = inverse(g);
      const Vec uv = u.value(z);
      double s = 0.0;
      for (int j = 0; j < 2; ++j) s += ginv(i, j) * uv[j];
      return std::sqrt(det(g)) * s;
    };
    double oracle = 0.0;
    for (int i = 0; i < 2; ++i)
      oracle += fd_partial([&](const Vec& z) { return flux_component(z, i); }, x, i);
    oracle /= std::sqrt(det(m.value(x)));
    REQUIRE(divergence(m, u, x) == Catch::Approx(oracle).margin(1e-8));
  }
}

TEST_CASE("symmetrized derivative: euclidean case and trace identity") {
  CovectorField u = CovectorField::from_exprs(2, {"x1^2*x2+0.3*x2", "sin(x1)+x2^2", ""});
  const MetricField eu = MetricField::euclidean(2);
  const Vec x(0.3, -0.2);
  const Mat ds = sym_differential(eu, u, x);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double fd_ij = fd_partial(
          [&](const Vec& z) { return u.comp[static_cast<std::size_t>(j)]->value(z); }, x, i);
      const double fd_ji = fd_partial(
          [&](const Vec& z) { return u.comp[static_cast<std::size_t>(i)]->value(z); }, x, j);
      REQUIRE(ds(i, j) == Catch::Approx(0.5 * (fd_ij + fd_ji)).margin(1e-9));
    }
  // Curved case: trace_g(d^s u) = delta u.
  const MetricField m = make_general_metric();
  for (const Vec& z : {Vec(0.3, -0.2), Vec(-0.5, 0.1)}) {
    const Mat ds2 = sym_differential(m, u, z);
    const Mat ginv = inverse(m.value(z));
    double tr = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) tr += ginv(i, j) * ds2(i, j);
    REQUIRE(tr == Catch::Approx(divergence(m, u, z)).margin(1e-12));
  }
}

TEST_CASE("energy and energy rescaling") {
  const MPSystem sys = make_sys_u(0.1);
  const Vec x(0.3, 0.4);
  const Vec v(0.6, -0.8);
  REQUIRE(energy(sys, x, v) == Catch::Approx(0.5 * 1.0 + 0.1 * 0.25).margin(1e-15));
  const Vec w = scale_to_energy(sys, x, v);
  REQUIRE(energy(sys, x, w) == Catch::Approx(sys.k).margin(1e-14));
  // Direction preserved.
  REQUIRE(w[0] * v[1] == Catch::Approx(w[1] * v[0]).margin(1e-15));

  const MPSystem curved = make_curved_system();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-0.6, 0.6);
  for (int t = 0; t < 20; ++t) {
    const Vec z(unif(rng), unif(rng));
    const Vec d(unif(rng), 0.3 + std::abs(unif(rng)));
    REQUIRE(energy(curved, z, scale_to_energy(curved, z, d)) ==
            Catch::Approx(curved.k).margin(1e-13));
  }
}

TEST_CASE("boundary normal and convexity margin") {
  const MPSystem se = make_sys_e();
  // SYS-E: margin is exactly 1 for every boundary point and tangent direction.
  for (int a = 0; a < 16; ++a) {
    const double t = 2.0 * M_PI * a / 16.0;
    const Vec x(std::cos(t), std::sin(t));
    const Vec nu = boundary_normal_inward(se, x);
    REQUIRE(nu[0] == Catch::Approx(-x[0]).margin(1e-14));
    REQUIRE(nu[1] == Catch::Approx(-x[1]).margin(1e-14));
    const Vec tan(-std::sin(t), std::cos(t));  // unit tangent, |v|^2 = 2k = 1
    REQUIRE(convexity_margin(se, x, tan) == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(convexity_margin(se, x, -1.0 * tan) == Catch::Approx(1.0).margin(1e-12));
  }
  // SYS-B at x = (1,0): margin = 1 -/+ B for the two tangent directions.
  const MPSystem sb = make_sys_b(0.2);
  const Vec xb(1.0, 0.0);
  const double m_up = convexity_margin(sb, xb, Vec(0.0, 1.0));
  const double m_dn = convexity_margin(sb, xb, Vec(0.0, -1.0));
  REQUIRE(std::min(m_up, m_dn) == Catch::Approx(0.8).margin(1e-13));
  REQUIRE(std::max(m_up, m_dn) == Catch::Approx(1.2).margin(1e-13));
  // Whole catalog: strictly convex boundary.
  for (const MPSystem& sys : make_catalog()) {
    for (int a = 0; a < 32; ++a) {
      const double t = 2.0 * M_PI * (a + 0.37) / 32.0;
      const Vec x(sys.R * std::cos(t), sys.R * std::sin(t));
      Vec tan(-std::sin(t), std::cos(t));
      tan = scale_to_energy(sys, x, tan);
      REQUIRE(convexity_margin(sys, x, tan) > 0.0);
      REQUIRE(convexity_margin(sys, x, -1.0 * tan) > 0.0);
    }
  }
}

TEST_CASE("system validation rejects bad input") {
  // Energy below the potential maximum.
  ScalarFieldPtr U = make_expr_field("x1^2+x2^2", 2);
  REQUIRE_THROWS_AS(make_system(MetricField::euclidean(2), CovectorField::zero(2), U, 0.5, 1.0),
                    ConfigError);
  // Metric losing positive-definiteness inside the ball.
  ScalarFieldPtr bad = make_expr_field("1-2*(x1^2+x2^2)", 2);
  REQUIRE_THROWS_AS(make_system(MetricField::conformal(bad), CovectorField::zero(2),
                                make_constant_field(2, 0.0), 0.5, 1.0),
                    NumericalError);
  // Valid system reports sensible stats.
  const MPSystem su = make_sys_u(0.1);
  REQUIRE(su.stats.max_u == Catch::Approx(0.1).margin(1e-12));
  REQUIRE(su.stats.min_p == Catch::Approx(0.8).margin(1e-12));
  REQUIRE(su.stats.max_p == Catch::Approx(1.0).margin(1e-12));
}
