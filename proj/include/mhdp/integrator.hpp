#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "mhdp/galerkin.hpp"

namespace mhdp {

/// Crank-Nicolson on the stiff diagonal (nu lambda / alpha, chi lambda) with
/// a Heun predictor-corrector on everything else.  dt = tau / n_steps.
struct IntegratorConfig {
  int n_steps = 1024;
  /// A step is rejected (and split in two) when it is non-finite or the
  /// state grows by more than this factor.
  double growth_limit = 1e6;
  int max_rejections = 6;
};

/// State layout: y = [c; d], length 2k.
struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
};

/// Explicit part of the split right-hand side, in d/dt form:
/// [rhs_linearized.u / alpha; rhs_linearized.h].
Eigen::VectorXd explicit_part(const GalerkinSystem& sys, double t, const Eigen::VectorXd& y);

/// Diagonal stiff rates: -nu lambda / alpha then -chi lambda.
Eigen::VectorXd stiff_rates(const GalerkinSystem& sys);

/// Integrates from t0 to t1 (t1 - t0 must be a whole number of steps).
/// Throws NonFiniteState with the offending time, or StepRejectionLimit.
Trajectory integrate(const GalerkinSystem& sys, const Eigen::VectorXd& y0, double t0, double t1,
                     const IntegratorConfig& cfg, bool keep_all = true);

/// One predictor-corrector step with given explicit evaluations:
/// y* = (y + dt e0 + dt/2 L y) / (1 - dt/2 L),
/// y1 = (y + dt/2 (e0 + e1) + dt/2 L y) / (1 - dt/2 L), where e1 is
/// evaluated at the predictor.
Eigen::VectorXd predictor(const Eigen::VectorXd& y, const Eigen::VectorXd& e0, const Eigen::VectorXd& L, double dt);
Eigen::VectorXd corrector(const Eigen::VectorXd& y, const Eigen::VectorXd& e0, const Eigen::VectorXd& e1,
                          const Eigen::VectorXd& L, double dt);

}  // namespace mhdp
