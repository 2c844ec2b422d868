#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "maglev/errors.hpp"

namespace maglev {

/// Physical parameters of the levitated half magnet (SI units throughout).
struct PlantParams {
  double m = 600.0;         ///< levitated mass [kg]
  double g = 9.81;          ///< gravitational acceleration [m/s^2]
  double C = 1e-3;          ///< magnet constant [N m^2 / A^2]
  double R_c = 4.0;         ///< coil resistance [Ohm]
  double F_load0 = 0.0;     ///< nominal load force [N]
  double u_min = -300.0;    ///< absolute voltage bounds [V]
  double u_max = 300.0;
  double s_guard_lo = 2e-3;   ///< physical air-gap validity window [m]
  double s_guard_hi = 20e-3;

  void validate() const;
};

/// Plant state in absolute coordinates.
struct PlantState {
  double z = 0.0;     ///< absolute position [m]
  double zdot = 0.0;  ///< absolute velocity [m/s]
  double I = 0.0;     ///< coil current [A]

  Eigen::Vector3d vec() const { return {z, zdot, I}; }
  static PlantState from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

struct DisturbanceSample {
  double d_gw = 0.0;      ///< guideway deflection [m]
  double d_gw_dot = 0.0;  ///< deflection rate [m/s]
  double d_load = 0.0;    ///< load-force disturbance [N]
};

struct PlantOutput {
  double s = 0.0;    ///< air gap [m]
  double zdd = 0.0;  ///< absolute acceleration [m/s^2]
  double I = 0.0;    ///< current [A]
};

/// Magnet map interface: force, current-dynamics coefficients alpha/beta, and
/// (for backends that support it) their analytic partial derivatives.
/// Backends are immutable after construction and shareable across threads.
class MagnetModel {
 public:
  virtual ~MagnetModel() = default;

  virtual double force(double s, double I) const = 0;
  virtual double alpha(double s, double sdot, double I) const = 0;
  virtual double beta(double s, double I) const = 0;

  /// Largest current for which the map is valid at gap s (used to bracket
  /// the equilibrium search).
  virtual double max_current(double s) const = 0;

  virtual bool has_analytic_derivatives() const { return false; }
  virtual double force_ds(double, double) const { throw std::logic_error("no analytic derivatives"); }
  virtual double force_dI(double, double) const { throw std::logic_error("no analytic derivatives"); }
  virtual double alpha_ds(double, double, double) const { throw std::logic_error("no analytic derivatives"); }
  virtual double alpha_dsdot(double, double, double) const { throw std::logic_error("no analytic derivatives"); }
  virtual double alpha_dI(double, double, double) const { throw std::logic_error("no analytic derivatives"); }
  virtual double beta_ds(double, double) const { throw std::logic_error("no analytic derivatives"); }
  virtual double beta_dI(double, double) const { throw std::logic_error("no analytic derivatives"); }
};

/// Closed-form single-magnet EMS model: F = C (I/s)^2, flux linkage
/// psi = L(s) I with L(s) = 2C/s, giving
///   alpha = -R_c s / (2C) + sdot / s,   beta = s / (2C).
class AnalyticMagnet final : public MagnetModel {
 public:
  AnalyticMagnet(double C, double R_c, double s_lo, double s_hi);

  double force(double s, double I) const override;
  double alpha(double s, double sdot, double I) const override;
  double beta(double s, double I) const override;
  double max_current(double s) const override;

  bool has_analytic_derivatives() const override { return true; }
  double force_ds(double s, double I) const override;
  double force_dI(double s, double I) const override;
  double alpha_ds(double s, double sdot, double I) const override;
  double alpha_dsdot(double s, double sdot, double I) const override;
  double alpha_dI(double s, double sdot, double I) const override;
  double beta_ds(double s, double I) const override;
  double beta_dI(double s, double I) const override;

 private:
  void check_gap(double s) const;
  double C_, R_c_, s_lo_, s_hi_;
};

/// Bilinear interpolation over rectangular (s, I) grids of F, alpha (at
/// sdot = 0), and beta.  The velocity term sdot/s of alpha is structural, not
/// magnetic, and is appended analytically.  Queries outside the grid hull are
/// rejected.
class TableMagnet final : public MagnetModel {
 public:
  TableMagnet(std::vector<double> s_axis, std::vector<double> I_axis,
              Eigen::MatrixXd F, Eigen::MatrixXd alpha0, Eigen::MatrixXd beta);

  double force(double s, double I) const override;
  double alpha(double s, double sdot, double I) const override;
  double beta(double s, double I) const override;
  double max_current(double s) const override;

  const std::vector<double>& s_axis() const { return s_axis_; }
  const std::vector<double>& I_axis() const { return I_axis_; }

 private:
  double interp(const Eigen::MatrixXd& table, double s, double I) const;
  std::vector<double> s_axis_, I_axis_;
  Eigen::MatrixXd F_, alpha0_, beta_;
};

/// Loads a table backend from a CSV file with header `s,I,F,alpha0,beta`,
/// rows in row-major order over a rectangular grid (s outer, I inner),
/// `#` comment lines allowed.
std::shared_ptr<TableMagnet> load_table(const std::string& path);

/// Writes a table file sampled from an arbitrary backend (used to produce
/// drop-in table files and for round-trip testing).
void write_table(const std::string& path, const MagnetModel& model, const std::vector<double>& s_axis,
                 const std::vector<double>& I_axis);

double magnet_force(const MagnetModel& model, double s, double I);

/// Plant ODE of the analysis model; the returned PlantState holds the time
/// derivatives of (z, zdot, I).  Throws DivergenceError when the air gap
/// leaves the validity window.
PlantState plant_deriv(const PlantState& x, double u, const DisturbanceSample& d, const PlantParams& p,
                       const MagnetModel& model);

PlantOutput plant_output(const PlantState& x, const DisturbanceSample& d, const PlantParams& p,
                         const MagnetModel& model);

/// Computes the equilibrium current and voltage at the target gap s0:
/// force(s0, I0) = m g + F_load0 (bisection on I) and U0 from the
/// steady-state condition alpha I0 + beta U0 = 0.
std::pair<double, double> equilibrium(const PlantParams& p, const MagnetModel& model, double s0);

}  // namespace maglev
