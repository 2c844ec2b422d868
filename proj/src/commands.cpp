#include "maglev/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <thread>

#include "maglev/metrics.hpp"
#include "maglev/simulate.hpp"

namespace maglev {

namespace {

constexpr const char* kFormatVersion = "maglev-csv/1";

std::ofstream open_csv(const RunConfig& cfg, const std::string& name, const std::string& columns) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << "# format = " << kFormatVersion << "\n";
  for (const auto& [k, v] : cfg.resolved()) out << "# " << k << " = " << v << "\n";
  out << columns << "\n";
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, n); ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

bool has_solver_failure(const SimLog& log) {
  return std::any_of(log.status.begin(), log.status.end(), [](SolveStatus s) {
    return s == SolveStatus::qp_failure || s == SolveStatus::domain_error;
  });
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double max_abs(const std::vector<double>& v, double nominal) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x - nominal));
  return m;
}

std::vector<double> guideway_choices(double v_min, double v_max, double v_step) {
  std::vector<double> out;
  for (double v = v_min; v <= v_max + 1e-9; v += v_step) out.push_back(v);
  return out;
}

/// Scenario with the sweep defaults applied: realistic guideway unless the
/// user picked one explicitly.
Scenario sweep_scenario(const RunConfig& cfg, double velocity, double duration) {
  Scenario sc = cfg.scenario;
  sc.velocity_kmh = velocity;
  sc.duration = duration;
  if (sc.guideway.kind == GuidewayKind::none) sc.guideway.kind = GuidewayKind::realistic;
  return sc;
}

}  // namespace

int cmd_simulate(const RunConfig& cfg) {
  const SimLog log = run_closed_loop(cfg.scenario, cfg.sys);

  auto out = open_csv(cfg, "simulate.csv", "t,s,zdd,I,u,status,solve_time");
  for (size_t k = 0; k < log.t.size(); ++k) {
    out << num(log.t[k]) << ',' << num(log.s[k]) << ',' << num(log.zdd[k]) << ',' << num(log.I[k]) << ','
        << num(log.u[k]) << ',' << to_string(log.status[k]) << ',' << num(log.solve_time[k]) << "\n";
  }
  out << "# verdict = " << (log.verdict == SimVerdict::stable ? "stable" : "diverged") << "\n";
  if (log.verdict == SimVerdict::diverged) out << "# diverge_time = " << num(log.diverge_time) << "\n";
  const auto [ss_up, ss_dn] = asymmetric_std(log.s, cfg.sys.eq.s0);
  out << "# std_s_above = " << num(ss_up) << "\n# std_s_below = " << num(ss_dn) << "\n";
  out << "# solve_time_mean = " << num(mean(log.solve_time)) << "\n";
  out << "# solve_time_max = "
      << num(log.solve_time.empty() ? 0.0
                                    : *std::max_element(log.solve_time.begin(), log.solve_time.end()))
      << "\n";

  std::printf("simulate: %s controller=%s steps=%zu std_s=(+%.3g,-%.3g) m\n",
              log.verdict == SimVerdict::stable ? "stable" : "diverged",
              to_string(cfg.scenario.controller).c_str(), log.t.size(), ss_up, ss_dn);
  if (log.verdict == SimVerdict::diverged) {
    std::printf("simulate: diverged at t=%.4f s\n", log.diverge_time);
    return exit_diverged;
  }
  if (has_solver_failure(log)) {
    std::printf("simulate: solver failure encountered\n");
    return exit_solver_failure;
  }
  return exit_ok;
}

int cmd_roa(const RunConfig& cfg) {
  std::vector<RoaResult> results;
  for (ControllerKind c : cfg.roa_controllers) {
    results.push_back(roa_sweep(cfg.roa, c, cfg.sys, cfg.jobs));
    const RoaResult& r = results.back();
    auto out = open_csv(cfg, "roa_" + to_string(c) + ".csv", "ds,sdot,controller,stabilized");
    for (int i = 0; i < r.grid.n_ds; ++i)
      for (int j = 0; j < r.grid.n_sdot; ++j)
        out << num(r.ds_values[i]) << ',' << num(r.sdot_values[j]) << ',' << to_string(c) << ','
            << (r.at(i, j) ? 1 : 0) << "\n";
    std::printf("roa: %s stabilized %d / %d grid points\n", to_string(c).c_str(), r.count(),
                r.grid.n_ds * r.grid.n_sdot);
  }

  for (size_t a = 0; a < results.size(); ++a) {
    if (cfg.roa_controllers[a] != ControllerKind::lqr) continue;
    for (size_t b = 0; b < results.size(); ++b) {
      if (b == a || cfg.roa_controllers[b] == ControllerKind::lqr) continue;
      int outside = 0;
      for (size_t k = 0; k < results[a].stabilized.size(); ++k)
        if (results[a].stabilized[k] && !results[b].stabilized[k]) ++outside;
      std::printf("roa: lqr points outside %s region: %d\n", to_string(cfg.roa_controllers[b]).c_str(),
                  outside);
    }
  }
  return exit_ok;
}

int cmd_horizon_sweep(const RunConfig& cfg) {
  const Eigen::Vector3d x0{cfg.horizon_x0_ds, cfg.horizon_x0_sdot, cfg.horizon_x0_dI};
  const double dN = cfg.sys.ocp.delta_N();

  auto traj = open_csv(cfg, "horizon_trajectories.csv", "T,Q_s,k,t,u_scaled,saturated");
  auto first = open_csv(cfg, "horizon_first_input.csv",
                        "T,Q_s,u0_scaled,rel_change,saturated,objective,iterations,status");

  bool failed = false;
  for (double Qs : cfg.horizon_Qs) {
    double u0_prev = 0.0;
    bool have_prev = false;
    for (double T : cfg.horizon_T) {
      OcpConfig ocp = cfg.sys.ocp;
      ocp.T = T;
      ocp.N = std::max(1, static_cast<int>(std::llround(T / dN)));
      ocp.Q[0] = Qs;
      auto problem = std::make_shared<OcpProblem>(ocp, cfg.sys.plant, cfg.sys.model, cfg.sys.eq);
      ShootingSolver solver(problem, cfg.sys.sqp);
      const SolveResult r = solver.sqp_solve(x0);
      if (r.status != SolveStatus::converged) failed = true;
      auto at_bound = [&](double u) {
        return u <= problem->u_lower() + 1e-9 || u >= problem->u_upper() - 1e-9;
      };
      for (size_t k = 0; k < r.u.size(); ++k)
        traj << num(T) << ',' << num(Qs) << ',' << k << ',' << num(k * dN) << ',' << num(r.u[k]) << ','
             << (at_bound(r.u[k]) ? 1 : 0) << "\n";
      const double u0 = r.u.empty() ? 0.0 : r.u.front();
      const double rel = have_prev && u0_prev != 0.0 ? std::abs(u0 - u0_prev) / std::abs(u0_prev) : 0.0;
      first << num(T) << ',' << num(Qs) << ',' << num(u0) << ',' << num(rel) << ','
            << (at_bound(u0) ? 1 : 0) << ',' << num(r.objective) << ',' << r.iterations << ','
            << to_string(r.status) << "\n";
      u0_prev = u0;
      have_prev = true;
      std::printf("horizon-sweep: T=%.3f Q_s=%g u0=%.6f (%s, %d iters)\n", T, Qs, u0,
                  to_string(r.status).c_str(), r.iterations);
    }
  }
  return failed ? exit_solver_failure : exit_ok;
}

int cmd_tune_sweep(const RunConfig& cfg) {
  struct Row {
    double Qs, Qzdd;
    bool stable = false, solver_fail = false;
    double ss_up = 0, ss_dn = 0, sz_up = 0, sz_dn = 0;
  };
  std::vector<Row> rows;
  for (double Qs : cfg.tune_Qs)
    for (double Qzdd : cfg.tune_Qzdd) rows.push_back({Qs, Qzdd});

  const Scenario sc = sweep_scenario(cfg, cfg.tune_velocity, cfg.tune_duration);
  parallel_for(static_cast<int>(rows.size()), cfg.jobs, [&](int i) {
    Row& row = rows[i];
    SystemConfig sys = cfg.sys;
    sys.ocp.Q = {row.Qs, row.Qzdd, cfg.tune_QI};
    const SimLog log = run_closed_loop(sc, sys);
    row.stable = log.verdict == SimVerdict::stable;
    row.solver_fail = has_solver_failure(log);
    std::tie(row.ss_up, row.ss_dn) = asymmetric_std(log.s, sys.eq.s0);
    std::tie(row.sz_up, row.sz_dn) = asymmetric_std(log.zdd, 0.0);
  });

  auto out = open_csv(cfg, "tune_sweep.csv",
                      "Q_s,Q_zdd,Q_I,stable,std_s_above,std_s_below,std_zdd_above,std_zdd_below");
  int stable_count = 0;
  for (const Row& r : rows) {
    out << num(r.Qs) << ',' << num(r.Qzdd) << ',' << num(cfg.tune_QI) << ','
        << (r.stable && !r.solver_fail ? 1 : 0) << ',' << num(r.ss_up) << ',' << num(r.ss_dn) << ','
        << num(r.sz_up) << ',' << num(r.sz_dn) << "\n";
    stable_count += r.stable && !r.solver_fail;
  }
  std::printf("tune-sweep: %d / %zu weight pairs stable\n", stable_count, rows.size());
  return exit_ok;
}

int cmd_robustness(const RunConfig& cfg) {
  const std::vector<double> velocities =
      guideway_choices(cfg.robust_v_min, cfg.robust_v_max, cfg.robust_v_step);
  struct Row {
    ControllerKind controller;
    double v;
    bool stable = false, solver_fail = false;
    double diverge_time = 0, ss_up = 0, ss_dn = 0, su_up = 0, su_dn = 0, max_ds = 0;
  };
  std::vector<Row> rows;
  for (ControllerKind c : cfg.robust_controllers)
    for (double v : velocities) rows.push_back({c, v});

  parallel_for(static_cast<int>(rows.size()), cfg.jobs, [&](int i) {
    Row& row = rows[i];
    Scenario sc = sweep_scenario(cfg, row.v, cfg.robust_duration);
    sc.controller = row.controller;
    const SimLog log = run_closed_loop(sc, cfg.sys);
    row.stable = log.verdict == SimVerdict::stable;
    row.solver_fail = has_solver_failure(log);
    row.diverge_time = log.verdict == SimVerdict::diverged ? log.diverge_time : -1.0;
    std::tie(row.ss_up, row.ss_dn) = asymmetric_std(log.s, cfg.sys.eq.s0);
    std::tie(row.su_up, row.su_dn) = asymmetric_std(log.u, cfg.sys.eq.U0);
    row.max_ds = max_abs(log.s, cfg.sys.eq.s0);
  });

  auto out = open_csv(cfg, "robustness.csv",
                      "controller,v_kmh,stable,solver_failures,diverge_time,std_s_above,std_s_below,"
                      "std_u_above,std_u_below,max_abs_ds");
  for (const Row& r : rows) {
    out << to_string(r.controller) << ',' << num(r.v) << ',' << (r.stable ? 1 : 0) << ','
        << (r.solver_fail ? 1 : 0) << ',' << num(r.diverge_time) << ',' << num(r.ss_up) << ','
        << num(r.ss_dn) << ',' << num(r.su_up) << ',' << num(r.su_dn) << ',' << num(r.max_ds) << "\n";
    std::printf("robustness: %s v=%g km/h -> %s\n", to_string(r.controller).c_str(), r.v,
                r.stable ? "stable" : "unstable");
  }
  return exit_ok;
}

int cmd_suboptimality(const RunConfig& cfg) {
  const Scenario base = sweep_scenario(cfg, cfg.subopt_velocity, cfg.subopt_duration);

  Scenario ref_sc = base;
  ref_sc.controller = ControllerKind::mpc_shooting;
  SystemConfig ref_sys = cfg.sys;
  ref_sys.ocp.T = cfg.subopt_ref_T;
  ref_sys.ocp.N = std::max(1, static_cast<int>(std::llround(cfg.subopt_ref_T / cfg.subopt_ref_dN)));
  const SimLog ref_log = run_closed_loop(ref_sc, ref_sys);
  if (ref_log.verdict != SimVerdict::stable) {
    std::printf("suboptimality: reference run diverged at t=%.4f s\n", ref_log.diverge_time);
    return exit_diverged;
  }

  struct Row {
    ControllerKind controller;
    double dN, T;
    bool stable = false;
    double rcso_val = 0, l2_u = 0, st_mean = 0, st_max = 0;
  };
  std::vector<Row> rows;
  for (ControllerKind c : {ControllerKind::mpc_rti, ControllerKind::mpc_gpm})
    for (double dN : cfg.subopt_dN)
      for (double T : cfg.subopt_T) rows.push_back({c, dN, T});

  parallel_for(static_cast<int>(rows.size()), cfg.jobs, [&](int i) {
    Row& row = rows[i];
    Scenario sc = base;
    sc.controller = row.controller;
    SystemConfig sys = cfg.sys;
    sys.ocp.T = row.T;
    sys.ocp.N = std::max(1, static_cast<int>(std::llround(row.T / row.dN)));
    const SimLog log = run_closed_loop(sc, sys);
    row.stable = log.verdict == SimVerdict::stable;
    if (row.stable) {
      row.rcso_val = rcso(log, ref_log, cfg.sys);
      std::vector<double> du(log.u.size());
      for (size_t k = 0; k < log.u.size(); ++k)
        du[k] = cfg.sys.ocp.scaling.scale_input(log.u[k] - cfg.sys.eq.U0);
      row.l2_u = l2_norm(du);
    }
    row.st_mean = mean(log.solve_time);
    row.st_max = log.solve_time.empty()
                     ? 0.0
                     : *std::max_element(log.solve_time.begin(), log.solve_time.end());
  });

  auto out = open_csv(cfg, "suboptimality.csv",
                      "solver,dN,T,stable,rcso,l2_u,solve_time_mean,solve_time_max");
  for (const Row& r : rows) {
    out << to_string(r.controller) << ',' << num(r.dN) << ',' << num(r.T) << ',' << (r.stable ? 1 : 0)
        << ',' << num(r.rcso_val) << ',' << num(r.l2_u) << ',' << num(r.st_mean) << ',' << num(r.st_max)
        << "\n";
    std::printf("suboptimality: %s dN=%g T=%g -> %s rcso=%.4g\n", to_string(r.controller).c_str(), r.dN,
                r.T, r.stable ? "stable" : "diverged", r.rcso_val);
  }
  return exit_ok;
}

}  // namespace maglev
