#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mhdp/galerkin.hpp"
#include "mhdp/integrator.hpp"

namespace mhdp {

enum class Strategy { March, NewtonPoincare, PicardPhi };

const char* to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

struct SolverConfig {
  Strategy strategy = Strategy::March;
  double tol_fp = 1e-9;
  int max_periods = 200;  // March
  int max_newton = 30;
  int max_picard = 200;
  double fd_step = 1e-6;  // Newton column perturbation, times (1 + |s_i|)
  IntegratorConfig integrator;
  std::uint64_t seed = 0;
};

/// sqrt(alpha |c|^2 + |d|^2) for y = [c; d].
double energy_norm(const Eigen::VectorXd& y, double alpha);

struct PeriodicOrbit {
  Strategy strategy = Strategy::March;
  int k = 0;
  std::vector<double> t;               // n_steps + 1 samples over [0, tau]
  std::vector<Eigen::VectorXd> y;      // [c; d] at each sample
  double residual = 0.0;               // |y(tau) - y(0)| from the final pass
  std::vector<double> history;         // per-iteration gap
  int iterations = 0;
  double wall_seconds = 0.0;
  double superposition_error = -1.0;   // PicardPhi spot check, -1 if not run

  Eigen::VectorXd c(std::size_t n) const { return y[n].head(k); }
  Eigen::VectorXd d(std::size_t n) const { return y[n].tail(k); }
};

/// Time-tau flow of y0 starting at t = 0.
Eigen::VectorXd poincare_map(const GalerkinSystem& sys, const Eigen::VectorXd& y0, const IntegratorConfig& cfg);

/// Finds the tau-periodic orbit.  Throws NotConverged with the iteration
/// history when the strategy's cap is reached.
PeriodicOrbit solve_periodic(const GalerkinSystem& sys, const SolverConfig& cfg);

/// Re-integrates one period from y0 and packages it as an orbit.
PeriodicOrbit orbit_from_start(const GalerkinSystem& sys, const Eigen::VectorXd& y0, const IntegratorConfig& cfg,
                               Strategy strategy);

/// Affine time-tau map of the linearized problem with frozen explicit
/// evaluations (e0[n] at t_n, e1[n] at t_{n+1}): returns the state after one
/// period starting from y0.
Eigen::VectorXd frozen_map(const GalerkinSystem& sys, const std::vector<Eigen::VectorXd>& e0,
                           const std::vector<Eigen::VectorXd>& e1, const Eigen::VectorXd& y0,
                           const IntegratorConfig& cfg, std::vector<Eigen::VectorXd>* path = nullptr);

/// Exact tau-periodic response of the linear problem without lifts,
/// alpha c' + nu lambda c = alpha F(t) and d = 0, with F the trigonometric
/// interpolant of the assembled forcing samples.  Returns [c; d] at t.
Eigen::VectorXd linear_response(const GalerkinSystem& sys, double t);

struct DecayReport {
  std::vector<double> distance2;  // alpha-weighted squared distance at t = p tau, p = 0..n
  std::vector<double> ratios;     // distance2[p+1] / distance2[p]
  bool monotone = false;
  bool roundoff_limited = false;  // some period ended at roundoff-level separation
  double q_emp = 0.0;             // fitted decay rate of distance2
  double q_structure = 0.0;       // lambda_min min(nu, chi) (1/alpha + 1)
  double l_emp = 0.0;             // q_emp / q_structure
};

/// Integrates orbit start + perturbation alongside the orbit for n_periods,
/// renormalizing the separation each period, and fits log(distance2)
/// against t over periods 1..n.
DecayReport contraction_probe(const GalerkinSystem& sys, const PeriodicOrbit& orbit, double perturbation_size,
                              int n_periods, const IntegratorConfig& cfg, std::uint64_t seed);

}  // namespace mhdp
