#include "prandtl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "prandtl/errors.hpp"

namespace prandtl {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParameterError(std::string(where) + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ParameterError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <class T>
void get_opt(const json& j, const char* key, T& out, const char* where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParameterError(std::string(where) + "." + key + ": " + e.what());
  }
}

const char* profile_name(Profile p) {
  switch (p) {
    case Profile::GaussY2: return "y2_gauss";
    case Profile::ExpY2: return "y2_exp";
    case Profile::Sine: return "sine";
  }
  return "?";
}

Profile profile_from(const std::string& s) {
  if (s == "y2_gauss") return Profile::GaussY2;
  if (s == "y2_exp") return Profile::ExpY2;
  if (s == "sine") return Profile::Sine;
  throw ParameterError("initial.components.profile: unknown profile '" + s + "'");
}

json grid_json(const GridSpec& g) {
  return {{"K", g.K}, {"Ny", g.Ny}, {"Ymax", g.Ymax}, {"stretch", g.stretch},
          {"max_diff_x", g.max_diff_x}};
}

GridSpec grid_from(const json& j, GridSpec g) {
  check_keys(j, "grid", {"K", "Ny", "Ymax", "stretch", "max_diff_x"});
  get_opt(j, "K", g.K, "grid");
  get_opt(j, "Ny", g.Ny, "grid");
  get_opt(j, "Ymax", g.Ymax, "grid");
  get_opt(j, "stretch", g.stretch, "grid");
  get_opt(j, "max_diff_x", g.max_diff_x, "grid");
  return g;
}

}  // namespace

json to_json(const RunConfig& cfg) {
  json comps = json::array();
  for (const auto& c : cfg.initial.components)
    comps.push_back({{"k", c.k}, {"amp_cos", c.amp_cos}, {"amp_sin", c.amp_sin},
                     {"profile", profile_name(c.profile)}, {"n", c.n}});
  return {
      {"grid", grid_json(cfg.grid)},
      {"gevrey",
       {{"ell", cfg.gevrey.ell}, {"N", cfg.gevrey.N}, {"rho0", cfg.gevrey.rho0},
        {"eps0", cfg.gevrey.eps0}}},
      {"dt", cfg.dt},
      {"t_final", cfg.t_final},
      {"initial", {{"normalize", cfg.initial.normalize}, {"components", comps}}},
      {"damping", cfg.damping},
      {"advection", cfg.advection},
      {"output_every", cfg.output_every},
      {"scheme", cfg.scheme},
      {"forcing", cfg.forcing == Forcing::Manufactured ? "manufactured" : "none"},
      {"compute_norms", cfg.compute_norms},
      {"compute_residuals", cfg.compute_residuals},
      {"dump_fields", cfg.dump_fields},
  };
}

RunConfig run_config_from_json(const json& j) {
  check_keys(j, "run config",
             {"grid", "gevrey", "dt", "t_final", "initial", "damping", "advection",
              "output_every", "scheme", "forcing", "compute_norms", "compute_residuals",
              "dump_fields"});
  RunConfig cfg;
  if (j.contains("grid")) cfg.grid = grid_from(j.at("grid"), cfg.grid);
  if (j.contains("gevrey")) {
    const json& g = j.at("gevrey");
    check_keys(g, "gevrey", {"ell", "N", "rho0", "eps0"});
    get_opt(g, "ell", cfg.gevrey.ell, "gevrey");
    if (g.contains("N"))
      get_opt(g, "N", cfg.gevrey.N, "gevrey");
    else
      cfg.gevrey.N = min_N_for_ell(cfg.gevrey.ell);
    get_opt(g, "rho0", cfg.gevrey.rho0, "gevrey");
    get_opt(g, "eps0", cfg.gevrey.eps0, "gevrey");
  }
  get_opt(j, "dt", cfg.dt, "run config");
  get_opt(j, "t_final", cfg.t_final, "run config");
  if (j.contains("initial")) {
    const json& in = j.at("initial");
    check_keys(in, "initial", {"normalize", "components"});
    get_opt(in, "normalize", cfg.initial.normalize, "initial");
    if (in.contains("components")) {
      if (!in.at("components").is_array())
        throw ParameterError("initial.components: expected an array");
      cfg.initial.components.clear();
      for (const json& c : in.at("components")) {
        check_keys(c, "initial.components", {"k", "amp_cos", "amp_sin", "profile", "n"});
        InitialComponent comp;
        get_opt(c, "k", comp.k, "initial.components");
        get_opt(c, "amp_cos", comp.amp_cos, "initial.components");
        get_opt(c, "amp_sin", comp.amp_sin, "initial.components");
        get_opt(c, "n", comp.n, "initial.components");
        if (c.contains("profile")) {
          std::string p;
          get_opt(c, "profile", p, "initial.components");
          comp.profile = profile_from(p);
        }
        cfg.initial.components.push_back(comp);
      }
    }
  }
  get_opt(j, "damping", cfg.damping, "run config");
  get_opt(j, "advection", cfg.advection, "run config");
  get_opt(j, "output_every", cfg.output_every, "run config");
  get_opt(j, "scheme", cfg.scheme, "run config");
  if (j.contains("forcing")) {
    std::string f;
    get_opt(j, "forcing", f, "run config");
    if (f == "none")
      cfg.forcing = Forcing::None;
    else if (f == "manufactured")
      cfg.forcing = Forcing::Manufactured;
    else
      throw ParameterError("forcing: expected 'none' or 'manufactured', got '" + f + "'");
  }
  get_opt(j, "compute_norms", cfg.compute_norms, "run config");
  get_opt(j, "compute_residuals", cfg.compute_residuals, "run config");
  get_opt(j, "dump_fields", cfg.dump_fields, "run config");
  cfg.validate();
  return cfg;
}

json to_json(const ToyConfig& cfg) {
  return {
      {"grid", grid_json(cfg.grid)},
      {"dt", cfg.dt},
      {"t_final", cfg.t_final},
      {"rho0", cfg.rho0},
      {"output_every", cfg.output_every},
      {"initial",
       {{"amplitude", cfg.initial.amplitude}, {"k", cfg.initial.k},
        {"center", cfg.initial.center}, {"sharpness", cfg.initial.sharpness},
        {"velocity", cfg.initial.velocity}}},
  };
}

ToyConfig toy_config_from_json(const json& j) {
  check_keys(j, "toy config", {"grid", "dt", "t_final", "rho0", "output_every", "initial"});
  ToyConfig cfg;
  if (j.contains("grid")) cfg.grid = grid_from(j.at("grid"), cfg.grid);
  get_opt(j, "dt", cfg.dt, "toy config");
  get_opt(j, "t_final", cfg.t_final, "toy config");
  get_opt(j, "rho0", cfg.rho0, "toy config");
  get_opt(j, "output_every", cfg.output_every, "toy config");
  if (j.contains("initial")) {
    const json& in = j.at("initial");
    check_keys(in, "initial", {"amplitude", "k", "center", "sharpness", "velocity"});
    get_opt(in, "amplitude", cfg.initial.amplitude, "initial");
    get_opt(in, "k", cfg.initial.k, "initial");
    get_opt(in, "center", cfg.initial.center, "initial");
    get_opt(in, "sharpness", cfg.initial.sharpness, "initial");
    get_opt(in, "velocity", cfg.initial.velocity, "initial");
  }
  cfg.validate();
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace prandtl
