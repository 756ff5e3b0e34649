#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mhdp/boundary_extension.hpp"
#include "mhdp/galerkin.hpp"
#include "mhdp/periodic_solver.hpp"
#include "mhdp/spectral_domain.hpp"

namespace mhdp {

/// One line of the certificate.  pass == (margin >= 0), margin = rhs - lhs.
struct CheckRecord {
  std::string name;
  std::string anchor;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = true;
  std::vector<double> series;  // optional per-time left-hand side
  std::string note;
};

/// Fixed name -> anchor table.  Every record's anchor comes from here.
const std::vector<std::pair<std::string, std::string>>& anchor_table();
const std::string& anchor_for(const std::string& name);
CheckRecord make_check(const std::string& name, double lhs, double rhs, std::string note = {});

struct EstimateReport {
  std::vector<CheckRecord> checks;
  std::vector<std::pair<std::string, double>> constants;  // in insertion order
  std::string header;

  void add(CheckRecord r) { checks.push_back(std::move(r)); }
  void set_constant(const std::string& name, double v);
  double constant(const std::string& name) const;  // NaN when absent
  const CheckRecord* find(const std::string& name) const;
  bool all_pass() const;
  /// name,anchor,lhs,rhs,margin,pass with %.17g numbers.
  void write_csv(std::ostream& os) const;
  std::string summary() const;
};

/// Order-th time derivative of tau-periodic samples (columns are n
/// equispaced times on [0, tau)), by FFT.
Eigen::MatrixXd spectral_time_derivative(const Eigen::MatrixXd& samples, double tau, int order);

/// Coefficient samples of an orbit as a 2k x n matrix (drops the closing
/// sample at t = tau).
Eigen::MatrixXd orbit_samples(const PeriodicOrbit& orbit);

struct VerifyInputs {
  const GalerkinSystem* sys = nullptr;
  const StokesBasis* basis = nullptr;
  const ExtensionField* B1 = nullptr;
  const ExtensionField* B2 = nullptr;
  const ForcingSpec* forcing = nullptr;
  double gamma = 0.0;
};

struct EnergyCheck {
  CheckRecord inequality;
  bool has_identity = false;  // only when B1 = B2 = 0
  CheckRecord identity;
  double C = 0.0;
  std::vector<double> lhs;  // d/dt(alpha|u|^2+|h|^2)/2 + nu|grad u|^2 + chi|grad h|^2 at every orbit sample
};

/// Energy balance of the orbit.  The constant of the bound is the smallest
/// uniform one over the coupling sample times, after discounting the
/// integrator tolerance 1e-7 times the orbit's dissipation scale.
EnergyCheck energy_inequality_check(const PeriodicOrbit& orbit, const VerifyInputs& in);

struct MeanValue {
  double t_star = 0.0;
  double value = 0.0;  // nu|grad u(t*)|^2 + chi|grad h(t*)|^2
  double mean = 0.0;   // period average of the same quantity
  std::size_t index = 0;
  CheckRecord check;
};
MeanValue mean_value_time(const PeriodicOrbit& orbit, const GalerkinSystem& sys);

/// Empirical constants entering the fractional-power estimate.
struct EstimateConstants {
  double gamma = 0.0;
  double mu = 0.0;  // lambda_min
  double alpha = 1.0, nu = 1.0, chi = 1.0;
  double M_f = 0.0, M0 = 0.0, M1 = 0.0;
  double M = 0.0;  // max(M_f, d2..d6)
  double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0, d5 = 0.0, d6 = 0.0;
  double z = 0.0, E = 0.0, P1 = 0.0, P2 = 0.0;
  double C_hat = 0.0, C1 = 0.0, C1_orbit = 0.0, C1_probe = 0.0, C9_tilde = 0.0;
  double C_bar = 0.5;
  std::vector<double> C;        // C2..C9 at index 2..9 (C3 is the barred one)
  std::vector<double> C_tilde;  // tilde C1..C8 at index 1..8
  double L1B = 0.0, L2B = 0.0;
};

/// Fits every symbolic constant as the smallest one making its displayed
/// bound hold at all coupling sample times, then evaluates the derived
/// quantities.  c1_probe < 0 skips the probe contribution.
EstimateConstants fit_constants(const PeriodicOrbit& orbit, const VerifyInputs& in, double c1_probe);

struct UniformBoundResult {
  CheckRecord smallness;
  CheckRecord bound;
  double sup_lhs = 0.0;
};
UniformBoundResult lemma7_certificate(const PeriodicOrbit& orbit, const Eigen::VectorXd& lambda, const EstimateConstants& K);

struct HigherOrder {
  double sup_grad_u = 0.0, sup_grad_h = 0.0;
  double sup_ut = 0.0, sup_ht = 0.0;
  double sup_Au = 0.0, sup_Ah = 0.0;
  double int_Aut2 = 0.0;  // integral of |A u_t|^2
  double int_utt2 = 0.0;  // integral of |u_tt|^2 + |h_tt|^2
  CheckRecord check;           // counts non-finite quantities
  CheckRecord gradient;        // mean-value bound on |grad u|^2 + |grad h|^2

  std::vector<double> values() const;
};
HigherOrder higher_order_report(const PeriodicOrbit& orbit, const GalerkinSystem& sys);
/// Largest relative change between two reports (e.g. n_steps and 2 n_steps).
double higher_order_drift(const HigherOrder& a, const HigherOrder& b);

struct GigaMiyakawa {
  double delta = 0.0, theta = 0.0, rho = 1.0;
  int trials = 0;
  double c1 = 0.0;  // max ratio over the trials
};
/// |A^{-delta} P(u . grad v)| / (|A^theta u| |A^rho v|) over random pairs
/// in span(basis), P taken as the projection on the basis.  Throws
/// ParameterConstraintViolated unless delta + theta + rho >= 1,
/// rho + delta > 1/2, theta >= 0 and rho > 0.
GigaMiyakawa giga_miyakawa_probe(const StokesBasis& basis, double delta, double theta, double rho, int trials,
                                 std::uint64_t seed);

/// sup_t (alpha|w|^2 + |z|^2) between two orbits on the same time grid,
/// against 1e-10 times the larger orbit's sup energy.
CheckRecord uniqueness_gap_check(const PeriodicOrbit& a, const PeriodicOrbit& b, double alpha);

CheckRecord contraction_check(const DecayReport& decay);

struct VerifyOptions {
  double c1_probe = -1.0;  // < 0: run the probe here
  int probe_trials = 100;
  std::uint64_t seed = 0;
};

/// Runs every single-orbit check and fills the constants table.
EstimateReport verify_orbit(const PeriodicOrbit& orbit, const VerifyInputs& in, const VerifyOptions& opt = {});

}  // namespace mhdp
