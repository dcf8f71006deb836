#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mpray/measures.hpp"
#include "mpray/rng.hpp"
#include "mpray/system.hpp"
#include "mpray/transform.hpp"

using namespace mpray;

namespace {

TensorTriple constant_v_triple(int dim, double c) {
  return TensorTriple(SymTensorField::zero(dim), CovectorField::zero(dim),
                      make_constant_field(dim, c));
}

}  // namespace

TEST_CASE("ray transform of [0, 0, 1] is the exit time") {
  REQUIRE(mp_ray(make_sys_e(), constant_v_triple(2, 1.0), Vec(-1, 0), Vec(1, 0)) ==
          Catch::Approx(2.0).margin(1e-9));
  REQUIRE(mp_ray(make_sys_b(0.2), constant_v_triple(2, 1.0), Vec(-1, 0), Vec(1, 0)) ==
          Catch::Approx(10.0 * std::atan(0.2)).margin(1e-9));
}

TEST_CASE("ray transform reproduces hand-computed line integrals") {
  const MPSystem sys = make_sys_e();
  // Along x(t) = (-1 + t, 0), v = (1, 0), t in [0, 2]:
  //   beta = (x1^2, 0), V = x1: integral of (s^2 + s) over s in [-1, 1] = 2/3.
  CovectorField beta = CovectorField::from_exprs(2, {"x1^2", "0", ""});
  ScalarFieldPtr V = make_expr_field("x1", 2);
  const TensorTriple f(SymTensorField::zero(2), beta, V);
  REQUIRE(mp_ray(sys, f, Vec(-1, 0), Vec(1, 0)) == Catch::Approx(2.0 / 3.0).margin(1e-9));
  // Constant h: integrand h_11 along the same ray.
  SymTensorField h = SymTensorField::zero(2);
  h.comp[static_cast<std::size_t>(sym_slot(0, 0))] = make_constant_field(2, 0.7);
  h.comp[static_cast<std::size_t>(sym_slot(0, 1))] = make_constant_field(2, 0.4);
  const TensorTriple f2(h, CovectorField::zero(2), make_constant_field(2, 0.0));
  REQUIRE(mp_ray(sys, f2, Vec(-1, 0), Vec(1, 0)) == Catch::Approx(1.4).margin(1e-9));
}

TEST_CASE("kernel generators are annihilated by the transform") {
  const std::vector<std::string> etas = {"0.3", "x1", "x1*x2+0.2", "sin(x1)*x2+0.1*x2^2"};
  for (const MPSystem& sys : make_catalog()) {
    for (const std::string& src : etas) {
      const TensorTriple ker = kernel_generator(sys, make_expr_field(src, 2));
      for (int a = 0; a < 5; ++a) {
        const Vec x = boundary_point_2d(sys, 2.0 * M_PI * (a + 0.3) / 5.0);
        for (double theta : {-0.7, 0.2, 1.0}) {
          const Vec v = boundary_vector_2d(sys, x, theta);
          CAPTURE(sys.name, src, a, theta);
          REQUIRE(std::abs(mp_ray(sys, ker, x, v)) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("reduction identity connects the two transforms") {
  Rng rng(20260816);
  for (const MPSystem& sys : make_catalog()) {
    const MPSystem red = reduce(sys);
    for (int trip = 0; trip < 3; ++trip) {
      const TensorTriple f = random_polynomial_triple(sys, 3, 1.0, &rng);
      for (int a = 0; a < 3; ++a) {
        const Vec x = boundary_point_2d(sys, 2.0 * M_PI * (a + 0.15) / 3.0);
        for (double theta : {-0.6, 0.5}) {
          const Vec v = boundary_vector_2d(sys, x, theta);
          CAPTURE(sys.name, trip, a, theta);
          REQUIRE(reduction_identity_residual(sys, red, f, x, v) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("phi map and its right inverse") {
  const MPSystem sys = make_sys_u(0.1);
  Rng rng(99);
  const TensorTriple f = random_polynomial_triple(sys, 2, 1.0, &rng);
  const MagneticPair pf = phi_map(sys, f);
  // Phi o preimage = identity on pairs.
  const TensorTriple back = phi_preimage(sys, pf);
  const MagneticPair pf2 = phi_map(sys, back);
  for (const Vec& x : {Vec(0.2, -0.3), Vec(0.0, 0.0), Vec(-0.6, 0.5)}) {
    const PairValue a = pf.value(x), b = pf2.value(x);
    for (int i = 0; i < 2; ++i) {
      REQUIRE(a.beta[i] == Catch::Approx(b.beta[i]).margin(1e-14));
      for (int j = 0; j < 2; ++j) REQUIRE(a.h(i, j) == Catch::Approx(b.h(i, j)).margin(1e-13));
    }
    // Pointwise formula: (Phi f).h = P h + g V.
    const TripleValue t = f.value(x);
    const double p = sys.p(x);
    const Mat g = sys.g.value(x);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        REQUIRE(a.h(i, j) == Catch::Approx(p * t.h(i, j) + t.V * g(i, j)).margin(1e-14));
  }
  // Kernel generators map to the zero pair.
  const TensorTriple ker = kernel_generator(sys, make_expr_field("x1*x2+0.5", 2));
  const MagneticPair pk = phi_map(sys, ker);
  for (const Vec& x : {Vec(0.2, -0.3), Vec(0.7, 0.1)}) {
    const PairValue a = pk.value(x);
    for (int i = 0; i < 2; ++i) {
      REQUIRE(a.beta[i] == 0.0);
      for (int j = 0; j < 2; ++j) REQUIRE(a.h(i, j) == Catch::Approx(0.0).margin(1e-15));
    }
  }
}

TEST_CASE("triple norms against closed forms") {
  const MPSystem sys = make_sys_e();
  REQUIRE(triple_l2_norm(sys, constant_v_triple(2, 1.0)) ==
          Catch::Approx(std::sqrt(M_PI)).margin(1e-10));
  // h = identity: |h|_g^2 = 2 on the euclidean disc, so the norm is sqrt(2 pi).
  const TensorTriple fid(SymTensorField::identity_multiple(2, 1.0), CovectorField::zero(2),
                         make_constant_field(2, 0.0));
  REQUIRE(triple_l2_norm(sys, fid) == Catch::Approx(std::sqrt(2.0 * M_PI)).margin(1e-10));
}

TEST_CASE("the transform satisfies the L2 boundedness estimate") {
  QuadratureSpec spec;
  spec.n_radial = 16;
  spec.n_angular = 32;
  spec.n_fiber = 16;
  // SYS-E with f = [0,0,1]: lhs = int tau^2 dmu = int 4 cos^3 = 32 pi / 3;
  // rhs = c_tau * vol(S^k M) with c_tau = max fan tau <= 2.
  const MPSystem se = make_sys_e();
  const BoundednessReport rep = boundedness_check(se, constant_v_triple(2, 1.0), spec);
  REQUIRE(rep.lhs == Catch::Approx(32.0 * M_PI / 3.0).epsilon(1e-6));
  REQUIRE(rep.c_tau > 1.9);
  REQUIRE(rep.c_tau <= 2.0 + 1e-12);
  REQUIRE(rep.rhs == Catch::Approx(rep.c_tau * 2.0 * M_PI * M_PI).epsilon(1e-8));
  REQUIRE(rep.holds);

  Rng rng(4242);
  for (const MPSystem& sys : make_catalog()) {
    const TensorTriple f = random_polynomial_triple(sys, 2, 1.0, &rng);
    const BoundednessReport r = boundedness_check(sys, f, spec);
    CAPTURE(sys.name, r.lhs, r.rhs);
    REQUIRE(r.holds);
    REQUIRE(r.lhs < r.rhs);  // strict
  }
}

TEST_CASE("sinograms are column-constant for rotation-invariant data") {
  const MPSystem sys = make_sys_e();
  const Sinogram sg = sinogram(sys, constant_v_triple(2, 1.0), 8, 6);
  REQUIRE(sg.a.size() == 8);
  REQUIRE(sg.theta.size() == 6);
  for (std::size_t j = 0; j < sg.theta.size(); ++j) {
    const double expected = 2.0 * std::cos(sg.theta[j]);  // chord exit time
    for (std::size_t i = 0; i < sg.a.size(); ++i)
      REQUIRE(sg.values[i][j] == Catch::Approx(expected).margin(1e-9));
  }
  // Deterministic across thread counts.
  const Sinogram sg4 = sinogram(sys, constant_v_triple(2, 1.0), 8, 6, 4);
  for (std::size_t i = 0; i < sg.a.size(); ++i)
    for (std::size_t j = 0; j < sg.theta.size(); ++j)
      REQUIRE(sg.values[i][j] == sg4.values[i][j]);
}

TEST_CASE("seeded polynomial triples are reproducible") {
  const MPSystem sys = make_sys_u(0.1);
  Rng r1(7), r2(7), r3(8);
  const std::string p1 = random_polynomial(2, 3, 1.0, &r1);
  const std::string p2 = random_polynomial(2, 3, 1.0, &r2);
  const std::string p3 = random_polynomial(2, 3, 1.0, &r3);
  REQUIRE(p1 == p2);
  REQUIRE(p1 != p3);
  Rng ra(123), rb(123);
  const TensorTriple fa = random_polynomial_triple(sys, 3, 1.0, &ra);
  const TensorTriple fb = random_polynomial_triple(sys, 3, 1.0, &rb);
  const Vec x(0.3, -0.4);
  const TripleValue va = fa.value(x), vb = fb.value(x);
  REQUIRE(va.V == vb.V);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(va.beta[i] == vb.beta[i]);
    for (int j = 0; j < 2; ++j) REQUIRE(va.h(i, j) == vb.h(i, j));
  }
}
