#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mhdp/boundary_extension.hpp"
#include "mhdp/config.hpp"
#include "mhdp/estimates.hpp"
#include "mhdp/galerkin.hpp"
#include "mhdp/harmonic_file.hpp"
#include "mhdp/periodic_solver.hpp"

namespace mhdp {

/// Basis, lifts and assembled Galerkin system for one resolution.
struct RunSystem {
  RunConfig cfg;
  int k = 0;
  std::optional<StokesBasis> basis;
  ForcingSpec forcing;
  BoundaryData beta1, beta2;
  ExtensionField B1, B2;
  GalerkinSystem sys;

  VerifyInputs inputs() const { return {&sys, &*basis, &B1, &B2, &forcing, cfg.gamma}; }
};

/// Errors are rethrown with the failing stage as a message prefix.
std::unique_ptr<RunSystem> build_system(const RunConfig& cfg, int k);

struct RunResult {
  std::string command;
  std::string config_hash;
  PeriodicOrbit orbit;
  EstimateReport report;
  double closed_form_error = -1.0;  // linear runs without lifts only
  std::string manifest;             // JSON text
  std::vector<std::string> files;   // written paths
};

/// basis -> extension -> assembly -> solve -> verify, then writes
/// orbit.csv, certificate.csv, summary.txt and manifest.json into cfg.dir
/// when `write` is set.
RunResult cmd_solve(const RunConfig& cfg, bool write = true);

/// Same run with zero magnetic data; throws MagneticLeak when
/// sup|h| > 1e-12 (1 + sup|u|).  Refuses nonzero magnetic boundary data.
RunResult cmd_ns_mode(const RunConfig& cfg, bool write = true);

struct SweepEntry {
  int k = 0;
  bool ok = false;
  std::string error;
  double residual = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  PeriodicOrbit orbit;
};

struct SweepResult {
  std::vector<SweepEntry> runs;
  std::vector<double> gaps;  // between consecutive successful k
  bool pass = false;
  double wall_seconds = 0.0;
};

/// sup over the period of the alpha-energy distance between two orbits,
/// the smaller one padded with zero coefficients.
double orbit_gap(const PeriodicOrbit& a, const PeriodicOrbit& b, double alpha);

/// Pass rule: gaps nonincreasing and last gap <= first gap / 4, with gaps
/// at or below `floor` (roundoff) counted as zero; a single resolution
/// passes trivially.
bool sweep_passes(const std::vector<double>& gaps, double floor = 0.0);

SweepResult cmd_converge(const RunConfig& cfg, bool write = true);

/// Re-runs the certificate on the saved orbit (cfg.orbit or <dir>/orbit.csv).
/// Throws ConfigMismatch when the orbit was written for another config.
EstimateReport cmd_verify(const RunConfig& cfg, bool write = true);

/// Builds (or loads) the cached basis and returns its path.
std::string cmd_basis(const RunConfig& cfg);

void write_orbit_csv(const std::string& path, const PeriodicOrbit& orbit, const std::string& config_hash,
                     double tau);
/// Reads an orbit CSV; `config_hash` receives the recorded hash.
PeriodicOrbit read_orbit_csv(const std::string& path, std::string* config_hash);

}  // namespace mhdp
