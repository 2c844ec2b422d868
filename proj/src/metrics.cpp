#include "maglev/metrics.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "maglev/simulate.hpp"

namespace maglev {

double l2_norm(const std::vector<double>& u) {
  double acc = 0.0;
  for (double v : u) acc += v * v;
  return std::sqrt(acc);
}

std::vector<double> stage_cost_series(const SimLog& log, const SystemConfig& sys) {
  const ScalingConfig& sc = sys.ocp.scaling;
  std::vector<double> cost(log.t.size());
  for (size_t k = 0; k < log.t.size(); ++k) {
    const Eigen::Vector3d y_dev{log.s[k] - sys.eq.s0, log.zdd[k], log.I[k] - sys.eq.I0};
    const Eigen::Vector3d ys = sc.scale_output(y_dev);
    const double us = sc.scale_input(log.u[k] - sys.eq.U0);
    cost[k] = ys.dot(sys.ocp.Q.cwiseProduct(ys)) + sys.ocp.R * us * us;
  }
  return cost;
}

double rcso(const SimLog& test, const SimLog& ref, const SystemConfig& sys) {
  if (test.t.size() != ref.t.size()) throw MetricError("rcso: log lengths differ");
  const auto ct = stage_cost_series(test, sys);
  const auto cr = stage_cost_series(ref, sys);
  const double sum_t = std::accumulate(ct.begin(), ct.end(), 0.0);
  const double sum_r = std::accumulate(cr.begin(), cr.end(), 0.0);
  if (sum_r == 0.0) throw MetricError("rcso: reference cost is zero");
  return std::abs(sum_t - sum_r) / sum_r;
}

std::pair<double, double> asymmetric_std(const std::vector<double>& series, double nominal) {
  auto side_std = [&](bool above) {
    double sum = 0.0, sq = 0.0;
    size_t n = 0;
    for (double v : series) {
      if ((above && v > nominal) || (!above && v < nominal)) {
        sum += v;
        sq += v * v;
        ++n;
      }
    }
    if (n < 2) return 0.0;
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1)));
  };
  return {side_std(true), side_std(false)};
}

int RoaResult::count() const {
  int c = 0;
  for (auto v : stabilized) c += v != 0;
  return c;
}

RoaResult roa_sweep(const RoaGrid& grid, ControllerKind controller, const SystemConfig& sys, int jobs) {
  RoaResult res;
  res.grid = grid;
  res.ds_values.resize(grid.n_ds);
  res.sdot_values.resize(grid.n_sdot);
  for (int i = 0; i < grid.n_ds; ++i)
    res.ds_values[i] = grid.n_ds == 1 ? grid.ds_min
                                      : grid.ds_min + (grid.ds_max - grid.ds_min) * i / (grid.n_ds - 1);
  for (int j = 0; j < grid.n_sdot; ++j)
    res.sdot_values[j] = grid.n_sdot == 1
                             ? grid.sdot_min
                             : grid.sdot_min + (grid.sdot_max - grid.sdot_min) * j / (grid.n_sdot - 1);
  res.stabilized.assign(static_cast<size_t>(grid.n_ds) * grid.n_sdot, 0);

  const double tol = grid.tol_frac * sys.eq.s0;
  auto run_point = [&](int i, int j) {
    Scenario sc;
    sc.duration = grid.settle_time;
    sc.controller = controller;
    sc.estimator.mode = EstimatorMode::ideal;
    sc.guideway.kind = GuidewayKind::none;
    sc.load_estimator_enabled = false;
    sc.x0_set = true;
    sc.x0_ds = res.ds_values[i];
    sc.x0_sdot = res.sdot_values[j];
    sc.early_exit_on_settle = true;
    SimLog log;
    try {
      log = run_closed_loop(sc, sys);
    } catch (const BoundsError&) {
      return false;  // initial gap already outside the validity window
    }
    if (log.verdict != SimVerdict::stable || log.s.empty()) return false;
    return std::abs(log.s.back() - sys.eq.s0) < tol;
  };

  const int total = grid.n_ds * grid.n_sdot;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const int i = idx / grid.n_sdot;
      const int j = idx % grid.n_sdot;
      res.stabilized[idx] = run_point(i, j) ? 1 : 0;
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return res;
}

}  // namespace maglev
