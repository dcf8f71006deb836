// mpray: command-line driver for the MP-system toolkit.
//
// Subcommands: verify, integrate, transform, action, santalo, curvature.
// Exit codes: 0 success, 1 verification check failed, 2 configuration or
// usage error, 3 numerical failure.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpray/action.hpp"
#include "mpray/config.hpp"
#include "mpray/flow.hpp"
#include "mpray/io.hpp"
#include "mpray/measures.hpp"
#include "mpray/reduction.hpp"
#include "mpray/system.hpp"
#include "mpray/transform.hpp"
#include "mpray/verify.hpp"

namespace {

using mpray::Json;

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
  std::string config;
  std::string out;
  unsigned long long seed = 42;
  int threads = 1;
  int refine = 1;
  bool deterministic = false;
};

bool log_enabled() {
  const char* v = std::getenv("MPRAY_LOG");
  return v != nullptr && *v != '\0';
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[mpray] " << msg << "\n";
}

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config, "JSON system configuration")->required();
  cmd->add_option("--out", opts->out, "output file (default: stdout)");
  cmd->add_option("--seed", opts->seed, "seed for sampled checks");
  cmd->add_option("--threads", opts->threads, "worker threads for quadratures")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--refine", opts->refine, "multiply quadrature resolutions by this factor")
      ->check(CLI::Range(1, 16));
  cmd->add_flag("--deterministic", opts->deterministic,
                "omit timing fields so identical runs produce identical bytes");
}

void emit(const CommonOpts& opts, const std::string& text) {
  if (opts.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    auto f = mpray::open_output_file(opts.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
  }
}

Json system_summary(const mpray::MPSystem& sys) {
  Json j;
  j["name"] = sys.name;
  j["dim"] = sys.dim;
  j["energy"] = sys.k;
  j["radius"] = sys.R;
  return j;
}

Json record_envelope(const std::string& command, const mpray::MPSystem& sys,
                     const CommonOpts& opts) {
  Json j;
  j["tool"] = "mpray";
  j["version"] = kVersion;
  j["command"] = command;
  j["system"] = system_summary(sys);
  j["seed"] = opts.seed;
  // The thread count never changes results, so deterministic output omits it
  // (like wall time) to stay byte-identical across --threads values.
  if (!opts.deterministic) j["threads"] = opts.threads;
  return j;
}

class WallClock {
 public:
  explicit WallClock(bool enabled) : enabled_(enabled), t0_(std::chrono::steady_clock::now()) {}
  void stamp(Json* j) const {
    if (!enabled_) return;
    const auto dt = std::chrono::steady_clock::now() - t0_;
    (*j)["wall_time_s"] = std::chrono::duration<double>(dt).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point t0_;
};

std::vector<double> vec_list(const mpray::Vec& v, int dim) {
  std::vector<double> out;
  for (int i = 0; i < dim; ++i) out.push_back(v[i]);
  return out;
}

mpray::Vec parse_vec(const std::string& text, int dim, const std::string& flag) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw mpray::ConfigError(flag + ": cannot parse \"" + item + "\" as a number");
    }
  }
  if (static_cast<int>(parts.size()) != dim)
    throw mpray::ConfigError(flag + ": expected " + std::to_string(dim) + " comma-separated values");
  mpray::Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = parts[static_cast<std::size_t>(i)];
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw mpray::ConfigError(flag + ": cannot parse \"" + item + "\" as a number");
    }
  }
  return parts;
}

int cmd_verify(const CommonOpts& opts) {
  const WallClock clock(!opts.deterministic);
  const mpray::MPSystem sys = mpray::load_system(opts.config);
  const mpray::QuadratureSpec spec = mpray::load_quadrature(opts.config).refined(opts.refine);
  log_line("verifying system " + sys.name);
  const mpray::VerifyReport rep = mpray::run_verification(sys, spec, opts.seed, opts.threads);
  Json j = record_envelope("verify", sys, opts);
  Json checks = Json::array();
  for (const mpray::CheckResult& c : rep.checks) {
    Json cj;
    cj["name"] = c.name;
    if (c.error.empty()) cj["value"] = c.value;
    cj["threshold"] = c.threshold;
    cj["op"] = c.op;
    cj["pass"] = c.pass;
    if (!c.error.empty()) cj["error"] = c.error;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["all_pass"] = rep.all_pass;
  clock.stamp(&j);
  emit(opts, j.dump(2));
  return rep.all_pass ? 0 : 1;
}

int cmd_integrate(const CommonOpts& opts, double angle, double theta, const std::string& point,
                  const std::string& dir, int samples) {
  const WallClock clock(!opts.deterministic);
  const mpray::MPSystem sys = mpray::load_system(opts.config);
  mpray::Vec x0, v0;
  if (!point.empty() || !dir.empty()) {
    if (point.empty() || dir.empty())
      throw mpray::ConfigError("--point and --dir must be given together");
    x0 = parse_vec(point, sys.dim, "--point");
    if (!sys.contains(x0)) throw mpray::ConfigError("--point lies outside the ball");
    v0 = mpray::scale_to_energy(sys, x0, parse_vec(dir, sys.dim, "--dir"));
  } else {
    if (sys.dim != 2)
      throw mpray::ConfigError("--angle/--theta parametrization is 2D; use --point/--dir");
    x0 = mpray::boundary_point_2d(sys, angle);
    v0 = mpray::boundary_vector_2d(sys, x0, theta);
  }
  log_line("integrating ray for system " + sys.name);
  const mpray::Trajectory tr = mpray::sample_trajectory(sys, x0, v0, std::max(2, samples));
  Json j = record_envelope("integrate", sys, opts);
  Json params;
  params["x0"] = vec_list(x0, sys.dim);
  params["v0"] = vec_list(v0, sys.dim);
  j["params"] = params;
  Json result;
  result["tau"] = tr.tau;
  const mpray::TrajectorySample& last = tr.samples.back();
  result["exit_x"] = vec_list(last.x, sys.dim);
  result["exit_v"] = vec_list(last.v, sys.dim);
  double drift = 0.0;
  Json rows = Json::array();
  for (const mpray::TrajectorySample& s : tr.samples) {
    drift = std::max(drift, std::abs(s.energy - sys.k));
    Json row;
    row["t"] = s.t;
    row["x"] = vec_list(s.x, sys.dim);
    row["v"] = vec_list(s.v, sys.dim);
    row["energy"] = s.energy;
    rows.push_back(row);
  }
  result["energy_drift"] = drift;
  result["samples"] = rows;
  j["result"] = result;
  clock.stamp(&j);
  emit(opts, j.dump(2));
  return 0;
}

int cmd_transform(const CommonOpts& opts, int n_a, int n_theta) {
  const mpray::MPSystem sys = mpray::load_system(opts.config);
  if (sys.dim != 2) throw mpray::ConfigError("sinograms are only defined for 2D systems");
  const Json root = mpray::load_json_file(opts.config);
  if (!root.contains("triple"))
    throw mpray::ConfigError("transform needs a \"triple\" section in the config");
  const mpray::TensorTriple f = mpray::triple_from_json(root["triple"], sys.dim, "triple");
  log_line("computing sinogram " + std::to_string(n_a) + "x" + std::to_string(n_theta));
  const mpray::Sinogram sg = mpray::sinogram(sys, f, n_a, n_theta, opts.threads);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sg.a.size(); ++i)
    for (std::size_t jx = 0; jx < sg.theta.size(); ++jx)
      rows.push_back({sg.a[i], sg.theta[jx], sg.values[i][jx]});
  std::ostringstream csv;
  mpray::write_csv(csv, {"a", "theta", "If"}, rows);
  emit(opts, csv.str());
  return 0;
}

int cmd_action(const CommonOpts& opts, const std::string& angles_text) {
  const mpray::MPSystem sys = mpray::load_system(opts.config);
  if (sys.dim != 2) throw mpray::ConfigError("boundary action tables are only defined in 2D");
  const std::vector<double> angles = parse_list(angles_text, "--angles");
  if (angles.size() < 2) throw mpray::ConfigError("--angles needs at least two boundary angles");
  log_line("shooting " + std::to_string(angles.size() * (angles.size() - 1)) + " boundary pairs");
  const auto table = mpray::boundary_action_table(sys, angles);
  std::vector<std::string> header = {"from"};
  for (double a : angles) header.push_back("to_" + mpray::num_str(a));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    std::vector<double> row = {angles[i]};
    row.insert(row.end(), table[i].begin(), table[i].end());
    rows.push_back(row);
  }
  std::ostringstream csv;
  mpray::write_csv(csv, header, rows);
  emit(opts, csv.str());
  return 0;
}

int cmd_santalo(const CommonOpts& opts) {
  const WallClock clock(!opts.deterministic);
  const mpray::MPSystem sys = mpray::load_system(opts.config);
  const mpray::QuadratureSpec spec = mpray::load_quadrature(opts.config).refined(opts.refine);
  log_line("running Santalo quadratures for " + sys.name);
  const mpray::PhaseFunction one = [](const mpray::Vec&, const mpray::Vec&) { return 1.0; };
  const mpray::PhaseFunction probe = [&sys](const mpray::Vec& x, const mpray::Vec& v) {
    return std::exp(0.4 * x[0]) + 0.3 * v[0] / std::sqrt(sys.p(x));
  };
  Json j = record_envelope("santalo", sys, opts);
  Json result;
  const mpray::SantaloReport r1 = mpray::santalo_residual(sys, one, spec, opts.threads);
  result["phase_volume"] = r1.lhs;
  result["volume_residual"] = {{"lhs", r1.lhs}, {"rhs", r1.rhs}, {"rel_gap", r1.rel_gap}};
  const mpray::SantaloReport r2 = mpray::santalo_residual(sys, probe, spec, opts.threads);
  result["probe_residual"] = {{"lhs", r2.lhs}, {"rhs", r2.rhs}, {"rel_gap", r2.rel_gap}};
  j["result"] = result;
  clock.stamp(&j);
  emit(opts, j.dump(2));
  return 0;
}

int cmd_curvature(const CommonOpts& opts) {
  const WallClock clock(!opts.deterministic);
  const mpray::MPSystem sys = mpray::load_system(opts.config);
  const mpray::QuadratureSpec spec = mpray::load_quadrature(opts.config).refined(opts.refine);
  log_line("estimating curvature bound for " + sys.name);
  const mpray::CurvatureReport rep = mpray::curvature_bound(sys, spec, opts.threads);
  Json j = record_envelope("curvature", sys, opts);
  Json result;
  result["k_sup"] = rep.k_sup;
  result["kmu_max"] = rep.kmu_max;
  result["verifiable"] = rep.verifiable;
  result["worst_boundary_angle"] = rep.worst_a;
  result["worst_fan_angle"] = rep.worst_theta;
  j["result"] = result;
  clock.stamp(&j);
  emit(opts, j.dump(2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mpray: ray transforms, reduction, and action data for MP-systems"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts vo;
  CLI::App* verify = app.add_subcommand("verify", "run the structural identity battery");
  add_common(verify, &vo);

  CommonOpts io_;
  double angle = 0.0, theta = 0.0;
  std::string point, dir;
  int samples = 33;
  CLI::App* integrate = app.add_subcommand("integrate", "integrate one trajectory to the boundary");
  add_common(integrate, &io_);
  integrate->add_option("--angle", angle, "boundary angle of the start point (2D)");
  integrate->add_option("--theta", theta, "angle from the inward normal (2D)");
  integrate->add_option("--point", point, "interior start point, comma-separated");
  integrate->add_option("--dir", dir, "start direction (rescaled to the energy shell)");
  integrate->add_option("--samples", samples, "trajectory samples to report")
      ->check(CLI::Range(2, 100000));

  CommonOpts to;
  int n_a = 32, n_theta = 16;
  CLI::App* transform = app.add_subcommand("transform", "sinogram of the configured triple");
  add_common(transform, &to);
  transform->add_option("--na", n_a, "boundary angle samples")->check(CLI::Range(1, 100000));
  transform->add_option("--ntheta", n_theta, "fan angle samples")->check(CLI::Range(1, 100000));

  CommonOpts ao;
  std::string angles = "0.4,1.9,3.3,5.0";
  CLI::App* action = app.add_subcommand("action", "boundary action table between angle pairs");
  add_common(action, &ao);
  action->add_option("--angles", angles, "comma-separated boundary angles");

  CommonOpts so;
  CLI::App* santalo = app.add_subcommand("santalo", "Santalo formula residuals");
  add_common(santalo, &so);

  CommonOpts co;
  CLI::App* curvature = app.add_subcommand("curvature", "curvature functional bound report");
  add_common(curvature, &co);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(verify)) return cmd_verify(vo);
    if (app.got_subcommand(integrate)) return cmd_integrate(io_, angle, theta, point, dir, samples);
    if (app.got_subcommand(transform)) return cmd_transform(to, n_a, n_theta);
    if (app.got_subcommand(action)) return cmd_action(ao, angles);
    if (app.got_subcommand(santalo)) return cmd_santalo(so);
    if (app.got_subcommand(curvature)) return cmd_curvature(co);
  } catch (const mpray::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mpray::ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return 2;
  } catch (const mpray::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const mpray::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const mpray::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
