#include "maglev/plant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace maglev {

void PlantParams::validate() const {
  if (!(m > 0)) throw ConfigError("plant.m must be > 0");
  if (!(C > 0)) throw ConfigError("plant.C must be > 0");
  if (!(R_c > 0)) throw ConfigError("plant.R_c must be > 0");
  if (!(u_min < u_max)) throw ConfigError("plant voltage bounds must satisfy u_min < u_max");
  if (!(0 < s_guard_lo && s_guard_lo < s_guard_hi)) throw ConfigError("plant gap guard window invalid");
}

AnalyticMagnet::AnalyticMagnet(double C, double R_c, double s_lo, double s_hi)
    : C_(C), R_c_(R_c), s_lo_(s_lo), s_hi_(s_hi) {
  if (!(C > 0) || !(R_c > 0) || !(0 < s_lo && s_lo < s_hi)) throw ConfigError("invalid analytic magnet parameters");
}

void AnalyticMagnet::check_gap(double s) const {
  if (s < s_lo_) throw BoundsError("air gap below lower validity bound s_guard_lo", s, s_lo_, s_hi_);
  if (s > s_hi_) throw BoundsError("air gap above upper validity bound s_guard_hi", s, s_lo_, s_hi_);
}

double AnalyticMagnet::force(double s, double I) const {
  check_gap(s);
  const double r = I / s;
  return C_ * r * r;
}

double AnalyticMagnet::alpha(double s, double sdot, double I) const {
  (void)I;
  check_gap(s);
  return -R_c_ * s / (2.0 * C_) + sdot / s;
}

double AnalyticMagnet::beta(double s, double I) const {
  (void)I;
  check_gap(s);
  return s / (2.0 * C_);
}

double AnalyticMagnet::max_current(double s) const {
  (void)s;
  return std::numeric_limits<double>::infinity();
}

double AnalyticMagnet::force_ds(double s, double I) const {
  check_gap(s);
  return -2.0 * C_ * I * I / (s * s * s);
}

double AnalyticMagnet::force_dI(double s, double I) const {
  check_gap(s);
  return 2.0 * C_ * I / (s * s);
}

double AnalyticMagnet::alpha_ds(double s, double sdot, double I) const {
  (void)I;
  check_gap(s);
  return -R_c_ / (2.0 * C_) - sdot / (s * s);
}

double AnalyticMagnet::alpha_dsdot(double s, double sdot, double I) const {
  (void)sdot;
  (void)I;
  check_gap(s);
  return 1.0 / s;
}

double AnalyticMagnet::alpha_dI(double, double, double) const { return 0.0; }

double AnalyticMagnet::beta_ds(double s, double I) const {
  (void)I;
  check_gap(s);
  return 1.0 / (2.0 * C_);
}

double AnalyticMagnet::beta_dI(double, double) const { return 0.0; }

TableMagnet::TableMagnet(std::vector<double> s_axis, std::vector<double> I_axis, Eigen::MatrixXd F,
                         Eigen::MatrixXd alpha0, Eigen::MatrixXd beta)
    : s_axis_(std::move(s_axis)), I_axis_(std::move(I_axis)), F_(std::move(F)), alpha0_(std::move(alpha0)),
      beta_(std::move(beta)) {
  const auto rows = static_cast<Eigen::Index>(s_axis_.size());
  const auto cols = static_cast<Eigen::Index>(I_axis_.size());
  if (rows < 2 || cols < 2) throw ConfigError("table grid needs at least 2 points per axis");
  if (F_.rows() != rows || F_.cols() != cols || alpha0_.rows() != rows || alpha0_.cols() != cols ||
      beta_.rows() != rows || beta_.cols() != cols) {
    throw ConfigError("table data shape does not match grid axes");
  }
  for (size_t i = 1; i < s_axis_.size(); ++i)
    if (!(s_axis_[i] > s_axis_[i - 1])) throw ConfigError("table s axis not strictly increasing");
  for (size_t i = 1; i < I_axis_.size(); ++i)
    if (!(I_axis_[i] > I_axis_[i - 1])) throw ConfigError("table I axis not strictly increasing");
}

namespace {

// Index of the cell containing v, i.e. axis[i] <= v <= axis[i+1].
size_t cell_index(const std::vector<double>& axis, double v, const char* name) {
  if (v < axis.front() || v > axis.back())
    throw BoundsError(std::string(name) + " outside table grid hull", v, axis.front(), axis.back());
  const auto it = std::upper_bound(axis.begin(), axis.end(), v);
  size_t i = static_cast<size_t>(it - axis.begin());
  if (i > 0) --i;
  if (i >= axis.size() - 1) i = axis.size() - 2;
  return i;
}

}  // namespace

double TableMagnet::interp(const Eigen::MatrixXd& table, double s, double I) const {
  const size_t i = cell_index(s_axis_, s, "air gap s");
  const size_t j = cell_index(I_axis_, I, "current I");
  const double ts = (s - s_axis_[i]) / (s_axis_[i + 1] - s_axis_[i]);
  const double tI = (I - I_axis_[j]) / (I_axis_[j + 1] - I_axis_[j]);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  return (1 - ts) * (1 - tI) * table(ii, jj) + ts * (1 - tI) * table(ii + 1, jj) +
         (1 - ts) * tI * table(ii, jj + 1) + ts * tI * table(ii + 1, jj + 1);
}

double TableMagnet::force(double s, double I) const { return interp(F_, s, I); }

double TableMagnet::alpha(double s, double sdot, double I) const { return interp(alpha0_, s, I) + sdot / s; }

double TableMagnet::beta(double s, double I) const { return interp(beta_, s, I); }

double TableMagnet::max_current(double s) const {
  (void)s;
  return I_axis_.back();
}

std::shared_ptr<TableMagnet> load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open table file '" + path + "'", 0);

  struct Row {
    double s, I, F, a0, b;
  };
  std::vector<Row> rows;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header_seen) {
      std::string h = line.substr(first);
      h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\r' || c == '\t'; }), h.end());
      if (h != "s,I,F,alpha0,beta") throw ParseError("expected header 's,I,F,alpha0,beta'", lineno);
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    Row r{};
    char comma;
    if (!(ss >> r.s >> comma >> r.I >> comma >> r.F >> comma >> r.a0)) throw ParseError("malformed table row", lineno);
    if (!(ss >> comma >> r.b)) throw ParseError("missing column in table row", lineno);
    rows.push_back(r);
  }
  if (!header_seen) throw ParseError("empty table file", lineno);
  if (rows.empty()) throw ParseError("table file has no data rows", lineno);

  // Reconstruct the rectangular grid: s outer, I inner.
  std::vector<double> I_axis;
  for (const auto& r : rows) {
    if (!I_axis.empty() && r.I == I_axis.front()) break;
    I_axis.push_back(r.I);
  }
  const size_t nI = I_axis.size();
  if (nI == 0 || rows.size() % nI != 0) throw ParseError("table rows do not form a rectangular grid", lineno);
  const size_t nS = rows.size() / nI;
  std::vector<double> s_axis(nS);
  Eigen::MatrixXd F(nS, nI), a0(nS, nI), b(nS, nI);
  for (size_t i = 0; i < nS; ++i) {
    s_axis[i] = rows[i * nI].s;
    for (size_t j = 0; j < nI; ++j) {
      const Row& r = rows[i * nI + j];
      if (r.s != s_axis[i] || r.I != I_axis[j])
        throw ParseError("table grid not rectangular or out of order", static_cast<int>(i * nI + j) + 2);
      F(i, j) = r.F;
      a0(i, j) = r.a0;
      b(i, j) = r.b;
    }
  }
  try {
    return std::make_shared<TableMagnet>(std::move(s_axis), std::move(I_axis), std::move(F), std::move(a0),
                                         std::move(b));
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), lineno);
  }
}

void write_table(const std::string& path, const MagnetModel& model, const std::vector<double>& s_axis,
                 const std::vector<double>& I_axis) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out.precision(17);
  out << "# magnet map sampled on a rectangular (s, I) grid, SI units\n";
  out << "s,I,F,alpha0,beta\n";
  for (double s : s_axis)
    for (double I : I_axis)
      out << s << "," << I << "," << model.force(s, I) << "," << model.alpha(s, 0.0, I) << "," << model.beta(s, I)
          << "\n";
}

double magnet_force(const MagnetModel& model, double s, double I) { return model.force(s, I); }

PlantState plant_deriv(const PlantState& x, double u, const DisturbanceSample& d, const PlantParams& p,
                       const MagnetModel& model) {
  const double s = x.z - d.d_gw;
  if (s < p.s_guard_lo || s > p.s_guard_hi) {
    throw DivergenceError("air gap left validity window: s = " + std::to_string(s), x.z, x.zdot, x.I);
  }
  const double sdot = x.zdot - d.d_gw_dot;
  PlantState dx;
  dx.z = x.zdot;
  dx.zdot = p.g + (p.F_load0 + d.d_load - model.force(s, x.I)) / p.m;
  dx.I = model.alpha(s, sdot, x.I) * x.I + model.beta(s, x.I) * u;
  return dx;
}

PlantOutput plant_output(const PlantState& x, const DisturbanceSample& d, const PlantParams& p,
                         const MagnetModel& model) {
  const double s = x.z - d.d_gw;
  if (s < p.s_guard_lo || s > p.s_guard_hi) {
    throw DivergenceError("air gap left validity window: s = " + std::to_string(s), x.z, x.zdot, x.I);
  }
  PlantOutput y;
  y.s = s;
  y.zdd = p.g + (p.F_load0 + d.d_load - model.force(s, x.I)) / p.m;
  y.I = x.I;
  return y;
}

std::pair<double, double> equilibrium(const PlantParams& p, const MagnetModel& model, double s0) {
  const double target = p.m * p.g + p.F_load0;
  if (target <= 0.0) return {0.0, 0.0};

  // Bracket the root of force(s0, I) = target on I >= 0; force is monotone
  // increasing in I.
  double I_lo = 0.0;
  double I_hi = 1.0;
  const double I_cap = model.max_current(s0);
  for (int iter = 0;; ++iter) {
    const double I_try = std::min(I_hi, I_cap);
    if (model.force(s0, I_try) >= target) {
      I_hi = I_try;
      break;
    }
    if (I_try >= I_cap || iter > 200) {
      throw InfeasibleEquilibriumError("required levitation force " + std::to_string(target) +
                                       " N not achievable at gap s0 = " + std::to_string(s0));
    }
    I_lo = I_try;
    I_hi *= 2.0;
  }
  for (int iter = 0; iter < 200 && (I_hi - I_lo) > 1e-14 * std::max(1.0, I_hi); ++iter) {
    const double mid = 0.5 * (I_lo + I_hi);
    (model.force(s0, mid) < target ? I_lo : I_hi) = mid;
  }
  const double I0 = 0.5 * (I_lo + I_hi);

  // Steady state: alpha(s0, 0, I0) I0 + beta(s0, I0) U0 = 0.
  const double U0 = -model.alpha(s0, 0.0, I0) * I0 / model.beta(s0, I0);
  return {I0, U0};
}

}  // namespace maglev
