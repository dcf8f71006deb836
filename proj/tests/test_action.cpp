#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mpray/action.hpp"
#include "mpray/flow.hpp"
#include "mpray/reduction.hpp"
#include "mpray/rng.hpp"
#include "mpray/system.hpp"
#include "mpray/transform.hpp"

using namespace mpray;

TEST_CASE("shooting recovers straight chords and known arcs") {
  const MPSystem se = make_sys_e();
  const ShootResult chord = shoot(se, Vec(-1, 0), Vec(1, 0));
  REQUIRE(chord.v0[0] == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(chord.v0[1] == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(chord.T == Catch::Approx(2.0).margin(1e-9));

  // SYS-B, B = 0.2: Larmor radius 5, circle through (-1,0), (1,0) with
  // center (0, sqrt(24)); departure velocity (sqrt(24)/5, -1/5), arc time
  // 10 asin(1/5).
  const MPSystem sb = make_sys_b(0.2);
  const ShootResult arc = shoot(sb, Vec(-1, 0), Vec(1, 0));
  REQUIRE(arc.v0[0] == Catch::Approx(std::sqrt(24.0) / 5.0).margin(1e-8));
  REQUIRE(arc.v0[1] == Catch::Approx(-0.2).margin(1e-8));
  REQUIRE(arc.T == Catch::Approx(10.0 * std::asin(0.2)).margin(1e-8));

  // SYS-U, eps = 0.1: antipodal boundary points are joined by the diameter
  // with harmonic time profile: v0 = (sqrt(0.8), 0), T = 2 atan(1/2)/sqrt(0.2).
  const MPSystem su = make_sys_u(0.1);
  const ShootResult diam = shoot(su, Vec(-1, 0), Vec(1, 0));
  REQUIRE(diam.v0[0] == Catch::Approx(std::sqrt(0.8)).margin(1e-8));
  REQUIRE(diam.v0[1] == Catch::Approx(0.0).margin(1e-8));
  REQUIRE(diam.T == Catch::Approx(2.0 * std::atan(0.5) / std::sqrt(0.2)).margin(1e-8));
}

TEST_CASE("shooting works between interior points") {
  for (const MPSystem& sys : make_catalog()) {
    const Vec x0(-0.4, 0.25), x1(0.5, -0.1);
    const ShootResult sr = shoot(sys, x0, x1);
    const Vec end = mp_exp(sys, x0, sr.v0, sr.T);
    CAPTURE(sys.name);
    REQUIRE(norm(Vec(end[0] - x1[0], end[1] - x1[1])) <= 1e-9);
    REQUIRE(energy(sys, x0, sr.v0) == Catch::Approx(sys.k).margin(1e-12));
  }
}

TEST_CASE("Mane action matches closed forms") {
  // SYS-E: A = tau = chord length.
  const MPSystem se = make_sys_e();
  const ShootResult ce = shoot(se, Vec(-1, 0), Vec(1, 0));
  REQUIRE(mane_action(se, Vec(-1, 0), ce.v0, ce.T) == Catch::Approx(2.0).margin(1e-9));

  // SYS-B: A = T - int alpha = 5 asin(1/5) + sqrt(24)/5.
  const MPSystem sb = make_sys_b(0.2);
  const ShootResult cb = shoot(sb, Vec(-1, 0), Vec(1, 0));
  const double a_b = 5.0 * std::asin(0.2) + std::sqrt(24.0) / 5.0;
  REQUIRE(mane_action(sb, Vec(-1, 0), cb.v0, cb.T) == Catch::Approx(a_b).margin(1e-8));

  // SYS-U diameter: A = (atan(1/2) + 2/5) / sqrt(0.2).
  const MPSystem su = make_sys_u(0.1);
  const ShootResult cu = shoot(su, Vec(-1, 0), Vec(1, 0));
  const double a_u = (std::atan(0.5) + 0.4) / std::sqrt(0.2);
  REQUIRE(mane_action(su, Vec(-1, 0), cu.v0, cu.T) == Catch::Approx(a_u).margin(1e-8));
}

TEST_CASE("Mane action equals the magnetic action of the reduced system") {
  Rng rng(55);
  for (const MPSystem& sys : make_catalog()) {
    const MPSystem red = reduce(sys);
    for (int rep = 0; rep < 4; ++rep) {
      const double a0 = rng.uniform(0.0, 2.0 * M_PI);
      const double a1 = a0 + rng.uniform(1.0, M_PI);  // well-separated endpoints
      const Vec x0 = boundary_point_2d(sys, a0);
      const Vec x1 = boundary_point_2d(sys, a1);
      const ShootResult sr = shoot(sys, x0, x1);
      const ActionComparison cmp = compare_actions(sys, red, x0, sr.v0, sr.T);
      CAPTURE(sys.name, rep, a0, a1);
      REQUIRE(cmp.gap <= 1e-7);
      REQUIRE(cmp.a_mp == Catch::Approx(cmp.a_mag).margin(1e-7));
    }
  }
}

TEST_CASE("action linearization matches the ray transform integral") {
  const SymTensorField h = SymTensorField::from_exprs(
      2, {"0.2*x1*x2", "0.1*(1-x2^2)", "", "0.15*x1^2-0.1", "", ""});
  const CovectorField beta = CovectorField::from_exprs(2, {"0.1*x2", "0.2*x1-0.05", ""});
  const ScalarFieldPtr V = make_expr_field("0.1*x1+0.2*x2^2", 2);
  for (const MPSystem& sys : {make_sys_e(), make_sys_u(0.1), make_sys_b(0.2)}) {
    const Vec x0 = boundary_point_2d(sys, 3.4);
    const Vec x1 = boundary_point_2d(sys, 1.1);
    const LinearizationReport rep = linearization_check(sys, h, beta, V, x0, x1);
    CAPTURE(sys.name, rep.fd_derivative, rep.transform_value);
    REQUIRE(rep.residual <= 1e-5 * (1.0 + std::abs(rep.transform_value)));
  }
}

namespace {

std::vector<std::vector<double>> table_for(const MPSystem& sys) {
  return boundary_action_table(sys, {0.4, 1.9, 3.3, 5.0});
}

double max_table_gap(const std::vector<std::vector<double>>& a,
                     const std::vector<std::vector<double>>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

}  // namespace

TEST_CASE("gauge transformations preserve the boundary action table") {
  const MPSystem sys = make_sys_u(0.1);
  const auto base = table_for(sys);

  SECTION("boundary-fixing diffeomorphism") {
    PointMap f;
    f.dim = 2;
    const std::string b = "0.05*(1-x1^2-x2^2)^2";
    f.comp[0] = make_expr_field("x1+" + b + "*(0.6+x2)", 2);
    f.comp[1] = make_expr_field("x2+" + b + "*(0.4-x1)", 2);
    const MPSystem gs = gauge_diffeo(sys, f);
    REQUIRE(max_table_gap(base, table_for(gs)) <= 1e-6);
  }

  SECTION("adding an exact form to alpha") {
    // psi = 0.3 (1-r^2)^2 x1, dpsi written out by hand and checked by FD.
    const ScalarFieldPtr psi = make_expr_field("0.3*(1-x1^2-x2^2)^2*x1", 2);
    const CovectorField dpsi = CovectorField::from_exprs(
        2, {"0.3*((1-x1^2-x2^2)^2-4*x1^2*(1-x1^2-x2^2))", "-1.2*x1*x2*(1-x1^2-x2^2)", ""});
    for (const Vec& x : {Vec(0.3, -0.5), Vec(-0.2, 0.6)}) {
      const Jet2 pj = psi->jet(x);
      const Vec dv = dpsi.value(x);
      REQUIRE(dv[0] == Catch::Approx(pj.g[0]).margin(1e-12));
      REQUIRE(dv[1] == Catch::Approx(pj.g[1]).margin(1e-12));
    }
    const MPSystem gs = gauge_exact_form(sys, dpsi);
    REQUIRE(max_table_gap(base, table_for(gs)) <= 1e-7);
  }

  SECTION("conformal energy gauge") {
    const ScalarFieldPtr mu = make_expr_field("1+0.1*(1-x1^2-x2^2)^2", 2);
    const MPSystem gs = gauge_conformal(sys, mu);
    // Same reduced metric, same alpha: identical action data.
    REQUIRE(max_table_gap(base, table_for(gs)) <= 1e-7);
  }
}

TEST_CASE("gauge invariance holds with a magnetic field present") {
  const MPSystem sys = make_sys_b(0.2);
  const std::vector<double> angles = {0.7, 2.5, 4.4};
  const auto base = boundary_action_table(sys, angles);
  const ScalarFieldPtr mu = make_expr_field("1+0.08*(1-x1^2-x2^2)^2", 2);
  const auto conf = boundary_action_table(gauge_conformal(sys, mu), angles);
  REQUIRE(max_table_gap(base, conf) <= 1e-7);
}
