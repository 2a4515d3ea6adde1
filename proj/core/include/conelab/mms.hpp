#pragma once

#include "conelab/integrator.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace conelab::dyn {

/// Exact solution sampled on a grid: u, du/dt, L u and L^2 u with L = Delta + 1.
struct ExactSample {
  ModalField u;
  ModalField u_t;
  ModalField lu;
  ModalField l2u;
};

class ManufacturedSolution {
public:
  virtual ~ManufacturedSolution() = default;
  virtual std::string name() const = 0;
  virtual ExactSample sample(const disc::RadialGrid& grid, int k_max, double t) const = 0;
};

/// u = e^{-t} cos(x / R) on the round sphere of radius R (zonal, mode 0).
class SphereZonalSolution : public ManufacturedSolution {
public:
  explicit SphereZonalSolution(double radius) : radius_(radius) {}
  std::string name() const override { return "sphere-zonal"; }
  ExactSample sample(const disc::RadialGrid& grid, int k_max, double t) const override;

private:
  double radius_;
};

/// u = c on any surface.
class ConstantSolution : public ManufacturedSolution {
public:
  explicit ConstantSolution(double value) : value_(value) {}
  std::string name() const override { return "constant"; }
  ExactSample sample(const disc::RadialGrid& grid, int k_max, double t) const override;

private:
  double value_;
};

/// u = e^{-t} sum_i c_i x^{p_i} cos(k theta) on a straight cone of opening rho0,
/// using Delta_k x^p = (p^2 - k^2 / rho0^2) x^{p-2}.
class ConePowerSolution : public ManufacturedSolution {
public:
  ConePowerSolution(double rho0, int mode, std::vector<std::pair<double, double>> terms)
      : rho0_(rho0), mode_(mode), terms_(std::move(terms)) {}
  std::string name() const override { return "cone-power"; }
  ExactSample sample(const disc::RadialGrid& grid, int k_max, double t) const override;

private:
  double rho0_;
  int mode_;
  /// (exponent, coefficient) pairs.
  std::vector<std::pair<double, double>> terms_;
};

/// g = u_t + L^2 u - F(u) with closure data from the exact solution.
class ManufacturedForcing : public Forcing {
public:
  ManufacturedForcing(std::shared_ptr<const ManufacturedSolution> solution, const disc::RadialGrid& grid, int k_max,
                      Nonlinearity nonlinearity, std::size_t theta_points);
  ForcingSample evaluate(double t, const std::vector<disc::ModeOperator>& ops) const override;

private:
  std::shared_ptr<const ManufacturedSolution> solution_;
  disc::RadialGrid grid_;
  int k_max_;
  Nonlinearity nl_;
  std::shared_ptr<ThetaTransform> transform_;
};

struct MmsLadder {
  std::vector<int> n_radial{64, 128, 256, 512};
  /// Time step and horizon of the spatial ladder.
  double spatial_dt = 1e-4;
  double spatial_t_final = 0.05;
  std::vector<double> dts{4e-3, 2e-3, 1e-3};
  int temporal_n = 256;
  double temporal_t_final = 0.5;
  int k_max = 0;
};

struct MmsRow {
  std::string ladder;
  int n_radial;
  double dt;
  double linf_error;
  double norm_error;
  /// max |u_k| over modes without exact content.
  double spurious_mode_max;
};

struct MmsTable {
  std::string solution;
  std::vector<MmsRow> rows;
  /// Least-squares orders: -slope of log error against log N, slope against log dt.
  double spatial_order;
  double temporal_order;
  double spurious_mode_max;
};

/// Runs the refinement ladders against the exact solution and fits orders.
/// `cfg` supplies scheme, shift and norm; dt and t_final are overridden.
MmsTable mms_run(std::shared_ptr<const ManufacturedSolution> solution, const geometry::SurfaceOfRevolution& surface,
                 const Nonlinearity& nonlinearity, const SolverConfig& cfg, const MmsLadder& ladder);

/// Errors of one run at (N, dt) up to t_final.
MmsRow mms_single(std::shared_ptr<const ManufacturedSolution> solution, const geometry::SurfaceOfRevolution& surface,
                  const Nonlinearity& nonlinearity, SolverConfig cfg, int n_radial, int k_max, double dt,
                  double t_final);

} // namespace conelab::dyn
