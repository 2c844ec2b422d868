#include "maglev/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace maglev {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  const int i = static_cast<int>(x);
  if (i != x) throw ConfigError(key + ": not an integer: '" + v + "'");
  return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(key + ": not an unsigned integer: '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::vector<ControllerKind> parse_controller_list(const std::string& key, const std::string& v) {
  std::vector<ControllerKind> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_controller(trim(item)));
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt(const std::vector<ControllerKind>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += to_string(v[i]);
  }
  return out;
}

}  // namespace

ControllerKind parse_controller(const std::string& name) {
  if (name == "mpc-shooting") return ControllerKind::mpc_shooting;
  if (name == "mpc-rti") return ControllerKind::mpc_rti;
  if (name == "mpc-gpm") return ControllerKind::mpc_gpm;
  if (name == "lqr") return ControllerKind::lqr;
  throw ConfigError("unknown controller '" + name +
                    "' (expected mpc-shooting, mpc-rti, mpc-gpm, or lqr)");
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  KeyValueConfig kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    kv.values[key] = value;
  }
  return kv;
}

void KeyValueConfig::set_from_arg(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + arg + "'");
  values[trim(arg.substr(0, eq))] = trim(arg.substr(eq + 1));
}

RunConfig build_run_config(const KeyValueConfig& kv) {
  RunConfig rc;
  for (double T = 0.02; T <= 0.1005; T += 0.01) rc.horizon_T.push_back(T);
  rc.horizon_Qs = {75.0, 300.0};
  rc.tune_Qs = {0.0, 25.0, 75.0, 150.0, 300.0};
  rc.tune_Qzdd = {0.0, 5.0, 15.0, 45.0};
  for (double T = 0.02; T <= 0.1005; T += 0.01) rc.subopt_T.push_back(T);
  rc.subopt_dN = {1e-3, 2.5e-3};

  SystemConfig& sys = rc.sys;
  Scenario& sc = rc.scenario;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> keys = {
      {"plant.m", [&](auto& k, auto& v) { sys.plant.m = parse_double(k, v); }},
      {"plant.g", [&](auto& k, auto& v) { sys.plant.g = parse_double(k, v); }},
      {"plant.C", [&](auto& k, auto& v) { sys.plant.C = parse_double(k, v); }},
      {"plant.R_c", [&](auto& k, auto& v) { sys.plant.R_c = parse_double(k, v); }},
      {"plant.F_load0", [&](auto& k, auto& v) { sys.plant.F_load0 = parse_double(k, v); }},
      {"plant.u_min", [&](auto& k, auto& v) { sys.plant.u_min = parse_double(k, v); }},
      {"plant.u_max", [&](auto& k, auto& v) { sys.plant.u_max = parse_double(k, v); }},
      {"plant.s_guard_lo", [&](auto& k, auto& v) { sys.plant.s_guard_lo = parse_double(k, v); }},
      {"plant.s_guard_hi", [&](auto& k, auto& v) { sys.plant.s_guard_hi = parse_double(k, v); }},
      {"plant.s0", [&](auto& k, auto& v) { sys.s0 = parse_double(k, v); }},
      {"plant.model",
       [&](auto& k, auto& v) {
         if (v != "analytic" && v != "table") throw ConfigError(k + ": expected 'analytic' or 'table'");
         rc.model_kind = v;
       }},
      {"plant.table", [&](auto&, auto& v) { rc.table_path = v; }},

      {"scaling.ds", [&](auto& k, auto& v) { sys.ocp.scaling.x_scale[0] = parse_double(k, v); }},
      {"scaling.sdot", [&](auto& k, auto& v) { sys.ocp.scaling.x_scale[1] = parse_double(k, v); }},
      {"scaling.dI", [&](auto& k, auto& v) { sys.ocp.scaling.x_scale[2] = parse_double(k, v); }},
      {"scaling.u", [&](auto& k, auto& v) { sys.ocp.scaling.u_scale = parse_double(k, v); }},
      {"scaling.y_s", [&](auto& k, auto& v) { sys.ocp.scaling.y_scale[0] = parse_double(k, v); }},
      {"scaling.y_zdd", [&](auto& k, auto& v) { sys.ocp.scaling.y_scale[1] = parse_double(k, v); }},
      {"scaling.y_I", [&](auto& k, auto& v) { sys.ocp.scaling.y_scale[2] = parse_double(k, v); }},

      {"ocp.T", [&](auto& k, auto& v) { sys.ocp.T = parse_double(k, v); }},
      {"ocp.N", [&](auto& k, auto& v) { sys.ocp.N = parse_int(k, v); }},
      {"ocp.Q_s", [&](auto& k, auto& v) { sys.ocp.Q[0] = parse_double(k, v); }},
      {"ocp.Q_zdd", [&](auto& k, auto& v) { sys.ocp.Q[1] = parse_double(k, v); }},
      {"ocp.Q_I", [&](auto& k, auto& v) { sys.ocp.Q[2] = parse_double(k, v); }},
      {"ocp.R", [&](auto& k, auto& v) { sys.ocp.R = parse_double(k, v); }},
      {"ocp.substeps", [&](auto& k, auto& v) { sys.ocp.rk_substeps = parse_int(k, v); }},

      {"sqp.max_iter", [&](auto& k, auto& v) { sys.sqp.max_iter = parse_int(k, v); }},
      {"sqp.tol_kkt", [&](auto& k, auto& v) { sys.sqp.tol_kkt = parse_double(k, v); }},
      {"sqp.tol_defect", [&](auto& k, auto& v) { sys.sqp.tol_defect = parse_double(k, v); }},
      {"sqp.merit_penalty", [&](auto& k, auto& v) { sys.sqp.merit_penalty = parse_double(k, v); }},
      {"sqp.max_linesearch", [&](auto& k, auto& v) { sys.sqp.max_linesearch = parse_int(k, v); }},

      {"gpm.max_iter", [&](auto& k, auto& v) { sys.gpm.max_iter = parse_int(k, v); }},
      {"gpm.gamma0", [&](auto& k, auto& v) { sys.gpm.gamma0 = parse_double(k, v); }},
      {"gpm.tol_pg", [&](auto& k, auto& v) { sys.gpm.tol_pg = parse_double(k, v); }},
      {"gpm.tol_rel_cost", [&](auto& k, auto& v) { sys.gpm.tol_rel_cost = parse_double(k, v); }},
      {"gpm.grid_M", [&](auto& k, auto& v) { sys.gpm.grid_M = parse_int(k, v); }},
      {"gpm.closed_loop_iters", [&](auto& k, auto& v) { sys.gpm_closed_loop_iters = parse_int(k, v); }},

      {"estimator.mode",
       [&](auto& k, auto& v) {
         if (v == "ideal")
           sc.estimator.mode = EstimatorMode::ideal;
         else if (v == "filtered")
           sc.estimator.mode = EstimatorMode::filtered;
         else
           throw ConfigError(k + ": expected 'ideal' or 'filtered'");
       }},
      {"estimator.omega_c", [&](auto& k, auto& v) { sc.estimator.omega_c = parse_double(k, v); }},

      {"loadest.enabled", [&](auto& k, auto& v) { sc.load_estimator_enabled = parse_bool(k, v); }},
      {"loadest.k_s", [&](auto& k, auto& v) { sc.k_s = parse_double(k, v); }},

      {"guideway.kind",
       [&](auto& k, auto& v) {
         if (v == "none")
           sc.guideway.kind = GuidewayKind::none;
         else if (v == "approx")
           sc.guideway.kind = GuidewayKind::approx;
         else if (v == "realistic")
           sc.guideway.kind = GuidewayKind::realistic;
         else
           throw ConfigError(k + ": expected 'none', 'approx', or 'realistic'");
       }},
      {"guideway.lambda", [&](auto& k, auto& v) { sc.guideway.lambda_gw = parse_double(k, v); }},
      {"guideway.amplitude", [&](auto& k, auto& v) { sc.guideway.amplitude = parse_double(k, v); }},
      {"guideway.sigma_offset", [&](auto& k, auto& v) { sc.guideway.sigma_offset = parse_double(k, v); }},
      {"guideway.unevenness_amp", [&](auto& k, auto& v) { sc.guideway.unevenness_amp = parse_double(k, v); }},
      {"guideway.unevenness_wavelength",
       [&](auto& k, auto& v) { sc.guideway.unevenness_wavelength = parse_double(k, v); }},
      {"guideway.ramp_length", [&](auto& k, auto& v) { sc.guideway.ramp_length = parse_double(k, v); }},
      {"guideway.seed", [&](auto& k, auto& v) { sc.guideway.seed = parse_u64(k, v); }},

      {"scenario.controller", [&](auto&, auto& v) { sc.controller = parse_controller(v); }},
      {"scenario.velocity", [&](auto& k, auto& v) { sc.velocity_kmh = parse_double(k, v); }},
      {"scenario.duration", [&](auto& k, auto& v) { sc.duration = parse_double(k, v); }},
      {"scenario.delta", [&](auto& k, auto& v) { sc.delta = parse_double(k, v); }},
      {"scenario.plant_substeps", [&](auto& k, auto& v) { sc.plant_substeps = parse_int(k, v); }},
      {"scenario.x0_ds",
       [&](auto& k, auto& v) {
         sc.x0_ds = parse_double(k, v);
         sc.x0_set = true;
       }},
      {"scenario.x0_sdot",
       [&](auto& k, auto& v) {
         sc.x0_sdot = parse_double(k, v);
         sc.x0_set = true;
       }},
      {"scenario.x0_dI",
       [&](auto& k, auto& v) {
         sc.x0_dI = parse_double(k, v);
         sc.x0_set = true;
       }},
      {"load_step.time", [&](auto& k, auto& v) { sc.load_step.time = parse_double(k, v); }},
      {"load_step.force", [&](auto& k, auto& v) { sc.load_step.force = parse_double(k, v); }},
      {"noise.sigma_s", [&](auto& k, auto& v) { sc.noise.sigma_s = parse_double(k, v); }},
      {"noise.sigma_zdd", [&](auto& k, auto& v) { sc.noise.sigma_zdd = parse_double(k, v); }},
      {"noise.sigma_I", [&](auto& k, auto& v) { sc.noise.sigma_I = parse_double(k, v); }},
      {"noise.seed", [&](auto& k, auto& v) { sc.noise.seed = parse_u64(k, v); }},

      {"roa.ds_min", [&](auto& k, auto& v) { rc.roa.ds_min = parse_double(k, v); }},
      {"roa.ds_max", [&](auto& k, auto& v) { rc.roa.ds_max = parse_double(k, v); }},
      {"roa.n_ds", [&](auto& k, auto& v) { rc.roa.n_ds = parse_int(k, v); }},
      {"roa.sdot_min", [&](auto& k, auto& v) { rc.roa.sdot_min = parse_double(k, v); }},
      {"roa.sdot_max", [&](auto& k, auto& v) { rc.roa.sdot_max = parse_double(k, v); }},
      {"roa.n_sdot", [&](auto& k, auto& v) { rc.roa.n_sdot = parse_int(k, v); }},
      {"roa.settle_time", [&](auto& k, auto& v) { rc.roa.settle_time = parse_double(k, v); }},
      {"roa.tol_frac", [&](auto& k, auto& v) { rc.roa.tol_frac = parse_double(k, v); }},
      {"roa.controllers", [&](auto& k, auto& v) { rc.roa_controllers = parse_controller_list(k, v); }},

      {"horizon.T_list", [&](auto& k, auto& v) { rc.horizon_T = parse_double_list(k, v); }},
      {"horizon.Qs_list", [&](auto& k, auto& v) { rc.horizon_Qs = parse_double_list(k, v); }},
      {"horizon.x0_ds", [&](auto& k, auto& v) { rc.horizon_x0_ds = parse_double(k, v); }},
      {"horizon.x0_sdot", [&](auto& k, auto& v) { rc.horizon_x0_sdot = parse_double(k, v); }},
      {"horizon.x0_dI", [&](auto& k, auto& v) { rc.horizon_x0_dI = parse_double(k, v); }},

      {"tune.Qs_list", [&](auto& k, auto& v) { rc.tune_Qs = parse_double_list(k, v); }},
      {"tune.Qzdd_list", [&](auto& k, auto& v) { rc.tune_Qzdd = parse_double_list(k, v); }},
      {"tune.Q_I", [&](auto& k, auto& v) { rc.tune_QI = parse_double(k, v); }},
      {"tune.velocity", [&](auto& k, auto& v) { rc.tune_velocity = parse_double(k, v); }},
      {"tune.duration", [&](auto& k, auto& v) { rc.tune_duration = parse_double(k, v); }},

      {"robust.v_min", [&](auto& k, auto& v) { rc.robust_v_min = parse_double(k, v); }},
      {"robust.v_max", [&](auto& k, auto& v) { rc.robust_v_max = parse_double(k, v); }},
      {"robust.v_step", [&](auto& k, auto& v) { rc.robust_v_step = parse_double(k, v); }},
      {"robust.duration", [&](auto& k, auto& v) { rc.robust_duration = parse_double(k, v); }},
      {"robust.controllers", [&](auto& k, auto& v) { rc.robust_controllers = parse_controller_list(k, v); }},

      {"subopt.T_list", [&](auto& k, auto& v) { rc.subopt_T = parse_double_list(k, v); }},
      {"subopt.dN_list", [&](auto& k, auto& v) { rc.subopt_dN = parse_double_list(k, v); }},
      {"subopt.ref_T", [&](auto& k, auto& v) { rc.subopt_ref_T = parse_double(k, v); }},
      {"subopt.ref_dN", [&](auto& k, auto& v) { rc.subopt_ref_dN = parse_double(k, v); }},
      {"subopt.velocity", [&](auto& k, auto& v) { rc.subopt_velocity = parse_double(k, v); }},
      {"subopt.duration", [&](auto& k, auto& v) { rc.subopt_duration = parse_double(k, v); }},

      {"output.dir", [&](auto&, auto& v) { rc.out_dir = v; }},
      {"run.jobs", [&](auto& k, auto& v) { rc.jobs = parse_int(k, v); }},
  };

  for (const auto& [key, value] : kv.values) {
    const auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("unknown configuration key: " + key);
    it->second(key, value);
  }

  if (rc.model_kind == "table") {
    if (rc.table_path.empty()) throw ConfigError("plant.model = table requires plant.table");
    try {
      sys.model = load_table(rc.table_path);
    } catch (const ParseError& e) {
      throw ConfigError(std::string("plant.table: ") + e.what());
    }
  } else if (!rc.table_path.empty()) {
    throw ConfigError("plant.table is set but plant.model is not 'table'");
  }

  try {
    sys.plant.validate();
    sys.ocp.validate();
    sys.gpm.validate();
    sc.guideway.validate();
    sc.estimator.validate();
    sc.validate();
    sys.finalize();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (rc.jobs < 1) throw ConfigError("run.jobs must be >= 1");
  if (rc.roa.n_ds < 1 || rc.roa.n_sdot < 1) throw ConfigError("roa grid sizes must be >= 1");
  if (rc.robust_v_step <= 0) throw ConfigError("robust.v_step must be positive");
  return rc;
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&](const std::string& k, const std::string& v) { out.emplace_back(k, v); };
  add("plant.m", fmt(sys.plant.m));
  add("plant.g", fmt(sys.plant.g));
  add("plant.C", fmt(sys.plant.C));
  add("plant.R_c", fmt(sys.plant.R_c));
  add("plant.F_load0", fmt(sys.plant.F_load0));
  add("plant.u_min", fmt(sys.plant.u_min));
  add("plant.u_max", fmt(sys.plant.u_max));
  add("plant.s_guard_lo", fmt(sys.plant.s_guard_lo));
  add("plant.s_guard_hi", fmt(sys.plant.s_guard_hi));
  add("plant.s0", fmt(sys.s0));
  add("plant.model", model_kind);
  if (!table_path.empty()) add("plant.table", table_path);
  add("scaling.ds", fmt(sys.ocp.scaling.x_scale[0]));
  add("scaling.sdot", fmt(sys.ocp.scaling.x_scale[1]));
  add("scaling.dI", fmt(sys.ocp.scaling.x_scale[2]));
  add("scaling.u", fmt(sys.ocp.scaling.u_scale));
  add("scaling.y_s", fmt(sys.ocp.scaling.y_scale[0]));
  add("scaling.y_zdd", fmt(sys.ocp.scaling.y_scale[1]));
  add("scaling.y_I", fmt(sys.ocp.scaling.y_scale[2]));
  add("ocp.T", fmt(sys.ocp.T));
  add("ocp.N", std::to_string(sys.ocp.N));
  add("ocp.Q_s", fmt(sys.ocp.Q[0]));
  add("ocp.Q_zdd", fmt(sys.ocp.Q[1]));
  add("ocp.Q_I", fmt(sys.ocp.Q[2]));
  add("ocp.R", fmt(sys.ocp.R));
  add("ocp.substeps", std::to_string(sys.ocp.rk_substeps));
  add("sqp.max_iter", std::to_string(sys.sqp.max_iter));
  add("sqp.tol_kkt", fmt(sys.sqp.tol_kkt));
  add("sqp.tol_defect", fmt(sys.sqp.tol_defect));
  add("sqp.merit_penalty", fmt(sys.sqp.merit_penalty));
  add("sqp.max_linesearch", std::to_string(sys.sqp.max_linesearch));
  add("gpm.max_iter", std::to_string(sys.gpm.max_iter));
  add("gpm.gamma0", fmt(sys.gpm.gamma0));
  add("gpm.tol_pg", fmt(sys.gpm.tol_pg));
  add("gpm.tol_rel_cost", fmt(sys.gpm.tol_rel_cost));
  add("gpm.grid_M", std::to_string(sys.gpm.grid_M));
  add("gpm.closed_loop_iters", std::to_string(sys.gpm_closed_loop_iters));
  add("estimator.mode", scenario.estimator.mode == EstimatorMode::ideal ? "ideal" : "filtered");
  add("estimator.omega_c", fmt(scenario.estimator.omega_c));
  add("loadest.enabled", scenario.load_estimator_enabled ? "1" : "0");
  add("loadest.k_s", fmt(scenario.k_s));
  add("guideway.kind", scenario.guideway.kind == GuidewayKind::none
                           ? "none"
                           : (scenario.guideway.kind == GuidewayKind::approx ? "approx" : "realistic"));
  add("guideway.lambda", fmt(scenario.guideway.lambda_gw));
  add("guideway.amplitude", fmt(scenario.guideway.amplitude));
  add("guideway.sigma_offset", fmt(scenario.guideway.sigma_offset));
  add("guideway.unevenness_amp", fmt(scenario.guideway.unevenness_amp));
  add("guideway.unevenness_wavelength", fmt(scenario.guideway.unevenness_wavelength));
  add("guideway.ramp_length", fmt(scenario.guideway.ramp_length));
  add("guideway.seed", std::to_string(scenario.guideway.seed));
  add("scenario.controller", to_string(scenario.controller));
  add("scenario.velocity", fmt(scenario.velocity_kmh));
  add("scenario.duration", fmt(scenario.duration));
  add("scenario.delta", fmt(scenario.delta));
  add("scenario.plant_substeps", std::to_string(scenario.plant_substeps));
  if (scenario.x0_set) {
    add("scenario.x0_ds", fmt(scenario.x0_ds));
    add("scenario.x0_sdot", fmt(scenario.x0_sdot));
    add("scenario.x0_dI", fmt(scenario.x0_dI));
  }
  add("load_step.time", fmt(scenario.load_step.time));
  add("load_step.force", fmt(scenario.load_step.force));
  add("noise.sigma_s", fmt(scenario.noise.sigma_s));
  add("noise.sigma_zdd", fmt(scenario.noise.sigma_zdd));
  add("noise.sigma_I", fmt(scenario.noise.sigma_I));
  add("noise.seed", std::to_string(scenario.noise.seed));
  add("roa.ds_min", fmt(roa.ds_min));
  add("roa.ds_max", fmt(roa.ds_max));
  add("roa.n_ds", std::to_string(roa.n_ds));
  add("roa.sdot_min", fmt(roa.sdot_min));
  add("roa.sdot_max", fmt(roa.sdot_max));
  add("roa.n_sdot", std::to_string(roa.n_sdot));
  add("roa.settle_time", fmt(roa.settle_time));
  add("roa.tol_frac", fmt(roa.tol_frac));
  add("roa.controllers", fmt(roa_controllers));
  add("horizon.T_list", fmt(horizon_T));
  add("horizon.Qs_list", fmt(horizon_Qs));
  add("horizon.x0_ds", fmt(horizon_x0_ds));
  add("horizon.x0_sdot", fmt(horizon_x0_sdot));
  add("horizon.x0_dI", fmt(horizon_x0_dI));
  add("tune.Qs_list", fmt(tune_Qs));
  add("tune.Qzdd_list", fmt(tune_Qzdd));
  add("tune.Q_I", fmt(tune_QI));
  add("tune.velocity", fmt(tune_velocity));
  add("tune.duration", fmt(tune_duration));
  add("robust.v_min", fmt(robust_v_min));
  add("robust.v_max", fmt(robust_v_max));
  add("robust.v_step", fmt(robust_v_step));
  add("robust.duration", fmt(robust_duration));
  add("robust.controllers", fmt(robust_controllers));
  add("subopt.T_list", fmt(subopt_T));
  add("subopt.dN_list", fmt(subopt_dN));
  add("subopt.ref_T", fmt(subopt_ref_T));
  add("subopt.ref_dN", fmt(subopt_ref_dN));
  add("subopt.velocity", fmt(subopt_velocity));
  add("subopt.duration", fmt(subopt_duration));
  add("output.dir", out_dir);
  add("run.jobs", std::to_string(jobs));
  return out;
}

}  // namespace maglev
