// JSON configuration loading: systems, quadrature specs, and tensor triples.
// Unknown keys are rejected with their JSON-pointer path so typos surface as
// ConfigError instead of silently ignored settings.
#pragma once

#include <fstream>
#include <initializer_list>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpray/error.hpp"
#include "mpray/field.hpp"
#include "mpray/measures.hpp"
#include "mpray/system.hpp"
#include "mpray/transform.hpp"

namespace mpray {

using Json = nlohmann::ordered_json;

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

namespace detail {

inline void check_keys(const Json& obj, const std::string& where,
                       std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown key \"" + where + "/" + item.key() + "\"");
  }
}

inline const Json& need(const Json& obj, const std::string& where, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key \"" + where + "/" + key + "\"");
  return *it;
}

inline double need_number(const Json& obj, const std::string& where, const char* key) {
  const Json& v = need(obj, where, key);
  if (!v.is_number()) throw ConfigError("\"" + where + "/" + key + "\" must be a number");
  return v.get<double>();
}

inline std::string need_string(const Json& obj, const std::string& where, const char* key) {
  const Json& v = need(obj, where, key);
  if (!v.is_string()) throw ConfigError("\"" + where + "/" + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline MetricField metric_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_object()) throw ConfigError("\"" + where + "\" must be an object");
  const std::string kind = detail::need_string(j, where, "kind");
  if (kind == "euclidean") {
    detail::check_keys(j, where, {"kind"});
    return MetricField::euclidean(dim);
  }
  if (kind == "conformal") {
    detail::check_keys(j, where, {"kind", "factor"});
    return MetricField::conformal(make_expr_field(detail::need_string(j, where, "factor"), dim));
  }
  if (kind == "general") {
    detail::check_keys(j, where, {"kind", "components"});
    const Json& comps = detail::need(j, where, "components");
    if (!comps.is_object()) throw ConfigError("\"" + where + "/components\" must be an object");
    const std::string cw = where + "/components";
    if (dim == 2)
      detail::check_keys(comps, cw, {"g11", "g12", "g22"});
    else
      detail::check_keys(comps, cw, {"g11", "g12", "g13", "g22", "g23", "g33"});
    std::array<ScalarFieldPtr, 6> slots{};
    for (int i = 0; i < dim; ++i)
      for (int k = i; k < dim; ++k) {
        const std::string key = "g" + std::to_string(i + 1) + std::to_string(k + 1);
        slots[static_cast<std::size_t>(sym_slot(i, k))] =
            make_expr_field(detail::need_string(comps, cw, key.c_str()), dim);
      }
    return MetricField::general(dim, slots);
  }
  throw ConfigError("\"" + where + "/kind\" must be euclidean, conformal, or general");
}

inline CovectorField covector_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ConfigError("\"" + where + "\" must be an array of " + std::to_string(dim) +
                      " expressions");
  std::array<std::string, kMaxDim> srcs{};
  for (int i = 0; i < dim; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_string())
      throw ConfigError("\"" + where + "/" + std::to_string(i) + "\" must be a string");
    srcs[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<std::string>();
  }
  return CovectorField::from_exprs(dim, srcs);
}

// Full system description:
// {"name": ..., "dim": 2, "radius": 1.0, "energy": 0.5,
//  "metric": {...}, "alpha": [...], "potential": "expr"}
// alpha and potential may be omitted (zero).
inline MPSystem system_from_json(const Json& j, const std::string& where = "") {
  if (!j.is_object()) throw ConfigError("config root must be an object");
  detail::check_keys(j, where,
                     {"name", "dim", "radius", "energy", "metric", "alpha", "potential"});
  const Json& dj = detail::need(j, where, "dim");
  if (!dj.is_number_integer()) throw ConfigError("\"" + where + "/dim\" must be an integer");
  const int dim = dj.get<int>();
  if (dim != 2 && dim != 3)
    throw ConfigError("\"" + where + "/dim\" must be 2 or 3, got " + std::to_string(dim));
  const double radius = detail::need_number(j, where, "radius");
  const double energy = detail::need_number(j, where, "energy");
  const std::string name = j.contains("name") ? detail::need_string(j, where, "name") : "system";

  const MetricField g = metric_from_json(detail::need(j, where, "metric"), dim, where + "/metric");
  CovectorField alpha = j.contains("alpha")
                            ? covector_from_json(j["alpha"], dim, where + "/alpha")
                            : CovectorField::zero(dim);
  ScalarFieldPtr U = j.contains("potential")
                         ? make_expr_field(detail::need_string(j, where, "potential"), dim)
                         : make_constant_field(dim, 0.0);
  try {
    return make_system(g, alpha, U, energy, radius, name);
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad expression in config: ") + e.what());
  }
}

inline MPSystem load_system(const std::string& path) {
  const Json j = load_json_file(path);
  if (j.is_object() && j.contains("system")) {
    detail::check_keys(j, "", {"system", "quadrature", "triple"});
    return system_from_json(j["system"], "system");
  }
  return system_from_json(j);
}

inline QuadratureSpec quadrature_from_json(const Json& j, const std::string& where) {
  QuadratureSpec spec;
  if (!j.is_object()) throw ConfigError("\"" + where + "\" must be an object");
  detail::check_keys(j, where, {"n_boundary", "n_dirs", "n_radial", "n_angular", "n_fiber"});
  const auto get = [&](const char* key, int* out) {
    if (!j.contains(key)) return;
    const Json& v = j[key];
    if (!v.is_number_integer()) throw ConfigError("\"" + where + "/" + key + "\" must be an integer");
    *out = v.get<int>();
  };
  get("n_boundary", &spec.n_boundary);
  get("n_dirs", &spec.n_dirs);
  get("n_radial", &spec.n_radial);
  get("n_angular", &spec.n_angular);
  get("n_fiber", &spec.n_fiber);
  spec.validate();
  return spec;
}

// Quadrature spec from the optional "quadrature" section of a config file.
inline QuadratureSpec load_quadrature(const std::string& path) {
  const Json j = load_json_file(path);
  if (j.is_object() && j.contains("quadrature"))
    return quadrature_from_json(j["quadrature"], "quadrature");
  return QuadratureSpec{};
}

// Tensor triple: {"h": {"h11": ..., ...}, "beta": [...], "V": "expr"}; all
// sections optional (zero).
inline TensorTriple triple_from_json(const Json& j, int dim, const std::string& where) {
  if (!j.is_object()) throw ConfigError("\"" + where + "\" must be an object");
  detail::check_keys(j, where, {"h", "beta", "V"});
  SymTensorField h = SymTensorField::zero(dim);
  if (j.contains("h")) {
    const Json& hj = j["h"];
    const std::string hw = where + "/h";
    if (!hj.is_object()) throw ConfigError("\"" + hw + "\" must be an object");
    if (dim == 2)
      detail::check_keys(hj, hw, {"h11", "h12", "h22"});
    else
      detail::check_keys(hj, hw, {"h11", "h12", "h13", "h22", "h23", "h33"});
    for (int i = 0; i < dim; ++i)
      for (int k = i; k < dim; ++k) {
        const std::string key = "h" + std::to_string(i + 1) + std::to_string(k + 1);
        if (!hj.contains(key)) continue;
        if (!hj[key].is_string()) throw ConfigError("\"" + hw + "/" + key + "\" must be a string");
        h.comp[static_cast<std::size_t>(sym_slot(i, k))] =
            make_expr_field(hj[key].get<std::string>(), dim);
      }
  }
  CovectorField beta = j.contains("beta") ? covector_from_json(j["beta"], dim, where + "/beta")
                                          : CovectorField::zero(dim);
  ScalarFieldPtr V = j.contains("V") ? make_expr_field(detail::need_string(j, where, "V"), dim)
                                     : make_constant_field(dim, 0.0);
  return TensorTriple(h, beta, V);
}

}  // namespace mpray
