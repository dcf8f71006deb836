// Self-verification battery for a configured system: runs the structural
// identities of the toolkit (energy conservation, boundary convexity,
// magnetic reduction, transform kernel, reduction identity, action equality,
// the Santalo formula) at fixed tolerances and reports each outcome.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mpray/action.hpp"
#include "mpray/flow.hpp"
#include "mpray/geometry.hpp"
#include "mpray/measures.hpp"
#include "mpray/potentials.hpp"
#include "mpray/reduction.hpp"
#include "mpray/rng.hpp"
#include "mpray/system.hpp"
#include "mpray/transform.hpp"

namespace mpray {

struct CheckResult {
  std::string name;
  double value = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  std::string op;  // "<=" (residual) or ">" (lower bound)
  bool pass = false;
  std::string error;  // nonempty if the check itself threw
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass = false;
};

namespace detail {

inline std::vector<FanNode> pick_rays(const BoundaryFan& fan, std::size_t count, Rng* rng) {
  std::vector<FanNode> out;
  for (std::size_t i = 0; i < count && !fan.nodes.empty(); ++i)
    out.push_back(fan.nodes[rng->index(fan.nodes.size())]);
  return out;
}

inline void run_check(VerifyReport* rep, const std::string& name, double threshold,
                      const std::string& op, const std::function<double()>& fn) {
  CheckResult c;
  c.name = name;
  c.threshold = threshold;
  c.op = op;
  try {
    c.value = fn();
    c.pass = (op == "<=") ? (c.value <= threshold) : (c.value > threshold);
  } catch (const Error& e) {
    c.pass = false;
    c.error = e.what();
  }
  rep->checks.push_back(c);
}

}  // namespace detail

inline VerifyReport run_verification(const MPSystem& sys, const QuadratureSpec& spec,
                                     unsigned long long seed, int threads) {
  VerifyReport rep;
  Rng rng(seed);
  const MPSystem red = reduce(sys);
  QuadratureSpec fan_spec = spec;
  fan_spec.n_boundary = std::min(spec.n_boundary, 16);
  fan_spec.n_dirs = std::min(spec.n_dirs, 4);
  const BoundaryFan fan = boundary_fan(sys, fan_spec);
  const std::vector<FanNode> rays = detail::pick_rays(fan, 6, &rng);

  detail::run_check(&rep, "energy-drift", 1e-9, "<=", [&] {
    double worst = 0.0;
    for (const FanNode& nd : rays) {
      const Trajectory tr = sample_trajectory(sys, nd.x, nd.v, 33);
      for (const TrajectorySample& s : tr.samples)
        worst = std::max(worst, std::abs(s.energy - sys.k));
    }
    return worst;
  });

  // The convexity condition constrains boundary-tangent shell vectors (the
  // grazing directions), so the margin is sampled over the tangent sphere.
  detail::run_check(&rep, "convexity-margin", 0.0, ">", [&] {
    double worst = std::numeric_limits<double>::infinity();
    const int n_pts = 24;
    for (int ip = 0; ip < n_pts; ++ip) {
      const double a = 2.0 * M_PI * ip / n_pts;
      Vec x(sys.dim);
      if (sys.dim == 2) {
        x = Vec(sys.R * std::cos(a), sys.R * std::sin(a));
      } else {
        const double band = -0.8 + 1.6 * ip / (n_pts - 1);
        const double rho = std::sqrt(1.0 - band * band);
        x = Vec(sys.R * rho * std::cos(3.0 * a), sys.R * rho * std::sin(3.0 * a), sys.R * band);
      }
      const Vec nu = boundary_normal_inward(sys, x);
      const std::vector<Vec> tangent = complement_frame(sys.g.value(x), nu);
      const double sp = std::sqrt(sys.p(x));
      const int n_dirs = (sys.dim == 2) ? 2 : 8;
      for (int id = 0; id < n_dirs; ++id) {
        const double psi = 2.0 * M_PI * id / n_dirs;
        Vec v(sys.dim);
        for (int i = 0; i < sys.dim; ++i) {
          v[i] = std::cos(psi) * tangent[0][i];
          if (sys.dim == 3) v[i] += std::sin(psi) * tangent[1][i];
          v[i] *= sp;
        }
        worst = std::min(worst, convexity_margin(sys, x, v));
      }
    }
    return worst;
  });

  detail::run_check(&rep, "reduction-correspondence", 1e-7, "<=", [&] {
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(rays.size(), 4); ++i) {
      const CorrespondenceReport c = correspondence_check(sys, rays[i].x, rays[i].v, 33);
      worst = std::max({worst, c.max_pos_err, c.max_vel_err});
    }
    return worst;
  });

  detail::run_check(&rep, "transform-kernel-ray", 1e-7, "<=", [&] {
    const TensorTriple ker =
        kernel_generator(sys, make_expr_field(random_polynomial(sys.dim, 2, 0.5, &rng), sys.dim));
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(rays.size(), 4); ++i)
      worst = std::max(worst, std::abs(mp_ray(sys, ker, rays[i].x, rays[i].v)));
    return worst;
  });

  detail::run_check(&rep, "reduction-transform-identity", 1e-6, "<=", [&] {
    const TensorTriple f = random_polynomial_triple(sys, 2, 0.5, &rng);
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min<std::size_t>(rays.size(), 4); ++i)
      worst = std::max(worst, reduction_identity_residual(sys, red, f, rays[i].x, rays[i].v));
    return worst;
  });

  detail::run_check(&rep, "potential-diagram-residual", 1e-8, "<=", [&] {
    MPGenerator w = random_boundary_vanishing_generator(sys, 2, 0.5, &rng);
    double worst = 0.0;
    for (int i = 0; i < 6; ++i) {
      Vec x(sys.dim);
      for (int d = 0; d < sys.dim; ++d) x[d] = rng.uniform(-0.5, 0.5) * sys.R;
      worst = std::max(worst, diagram_residual(sys, red, w, x));
    }
    return worst;
  });

  detail::run_check(&rep, "action-equality", 1e-6, "<=", [&] {
    double worst = 0.0;
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      const FanNode& a = fan.nodes[rng.index(fan.nodes.size())];
      const FanNode& b = fan.nodes[rng.index(fan.nodes.size())];
      Vec d(sys.dim);
      for (int i = 0; i < sys.dim; ++i) d[i] = b.x[i] - a.x[i];
      if (norm(d) < 0.5 * sys.R) continue;  // skip nearly coincident endpoints
      const ShootResult sr = shoot(sys, a.x, b.x);
      worst = std::max(worst, compare_actions(sys, red, a.x, sr.v0, sr.T).gap);
    }
    return worst;
  });

  detail::run_check(&rep, "santalo-residual", 5e-3, "<=", [&] {
    const PhaseFunction f = [&sys](const Vec& x, const Vec& v) {
      return std::exp(0.4 * x[0]) + 0.3 * v[0] / std::sqrt(sys.p(x));
    };
    return santalo_residual(sys, f, spec, threads).rel_gap;
  });

  rep.all_pass = true;
  for (const CheckResult& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
  return rep;
}

}  // namespace mpray
