#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mpray/reduction.hpp"
#include "mpray/system.hpp"

using namespace mpray;

TEST_CASE("reduction builds the conformally rescaled metric") {
  // SYS-U: P = 1 - 0.2 |x|^2, so G = (1 - 0.2 |x|^2) delta.
  const MPSystem red = reduce(make_sys_u(0.1));
  REQUIRE(red.g.kind() == MetricField::Kind::Conformal);
  REQUIRE(red.k == 0.5);
  const Vec x(0.3, -0.4);
  const double p = 1.0 - 0.2 * 0.25;
  const Mat G = red.g.value(x);
  REQUIRE(G(0, 0) == Catch::Approx(p).margin(1e-15));
  REQUIRE(G(1, 1) == Catch::Approx(p).margin(1e-15));
  REQUIRE(G(0, 1) == 0.0);
  // Zero potential: P of the reduced system is identically 1.
  REQUIRE(red.p(x) == Catch::Approx(1.0).margin(1e-15));

  // SYS-C: conformal times conformal stays conformal.
  const MPSystem redc = reduce(make_sys_c(0.05));
  REQUIRE(redc.g.kind() == MetricField::Kind::Conformal);
  const double factor = std::exp(0.1 * 0.25);  // P = 1 here (U = 0)
  REQUIRE(redc.g.value(x)(0, 0) == Catch::Approx(factor).margin(1e-15));
}

TEST_CASE("reduced rays have unit G-speed") {
  const MPSystem sys = make_sys_u(0.1);
  const MPSystem red = reduce(sys);
  const Vec x0 = boundary_point_2d(red, 0.3);
  const Vec v0 = boundary_vector_2d(red, x0, 0.7);
  const Trajectory tr = sample_trajectory(red, x0, v0, 30);
  for (const TrajectorySample& s : tr.samples) {
    const Mat G = red.g.value(s.x);
    REQUIRE(dot(s.v, G * s.v) == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("reparametrization is monotone with consistent inverse") {
  const MPSystem sys = make_sys_u(0.1);
  const Vec x0 = boundary_point_2d(sys, 1.2);
  const Vec v0 = boundary_vector_2d(sys, x0, -0.5);
  const ReparamMap map = reparametrize(sys, x0, v0);
  REQUIRE(map.tau() > 0.0);
  REQUIRE(map.s_total() > 0.0);
  double prev = -1.0;
  for (int i = 0; i <= 24; ++i) {
    const double t = map.tau() * i / 24.0;
    const double s = map.s_of_t(t);
    REQUIRE(s > prev);
    prev = s;
    REQUIRE(map.t_of_s(s) == Catch::Approx(t).margin(1e-10));
  }
  // P < 1 away from the origin for SYS-U, so s(t) lags t.
  REQUIRE(map.s_total() < map.tau());
}

TEST_CASE("two independent solvers agree through the time change") {
  for (const MPSystem& sys : make_catalog()) {
    for (double a : {0.4, 2.0, 4.4}) {
      const Vec x0 = boundary_point_2d(sys, a);
      for (double theta : {-0.8, 0.0, 0.6}) {
        const Vec v0 = boundary_vector_2d(sys, x0, theta);
        const CorrespondenceReport rep = correspondence_check(sys, x0, v0, 20);
        CAPTURE(sys.name, a, theta);
        REQUIRE(rep.max_pos_err <= 1e-8);
        REQUIRE(rep.max_vel_err <= 1e-8);
        REQUIRE(rep.tau_mag == Catch::Approx(rep.s_total).margin(1e-8));
      }
    }
  }
}

TEST_CASE("reduction is the identity when the potential vanishes and P = 1") {
  // SYS-B has U = 0, k = 1/2, so P = 1 and G = g: the magnetic ray equals
  // the MP-ray with the same parametrization.
  const MPSystem sys = make_sys_b(0.2);
  const Vec x0(-1.0, 0.0), v0(1.0, 0.0);
  const CorrespondenceReport rep = correspondence_check(sys, x0, v0, 10);
  REQUIRE(rep.tau_mp == Catch::Approx(10.0 * std::atan(0.2)).margin(1e-9));
  REQUIRE(rep.s_total == Catch::Approx(rep.tau_mp).margin(1e-12));
  REQUIRE(rep.max_pos_err <= 1e-9);
}
