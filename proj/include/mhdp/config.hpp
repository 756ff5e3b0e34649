#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mhdp/periodic_solver.hpp"
#include "mhdp/spectral_domain.hpp"

namespace mhdp {

/// Everything a run depends on.  Loaded from a TOML-style file:
///
///   [domain]  length_x wall_gap n_x n_y
///   [model]   k tau alpha nu chi gamma epsilon nonlinear
///   [inputs]  forcing velocity_boundary magnetic_boundary   (harmonic files)
///   [solver]  strategy tol_fp n_steps n_t max_periods max_newton max_picard
///             growth_limit max_rejections seed cross_check
///   [verify]  probe_trials decay_periods decay_size drift_check orbit
///   [converge] k_list
///   [output]  dir cache_dir
struct RunConfig {
  DomainSpec domain;
  int k = 16;
  double tau = 1.0;
  double alpha = 1.0;
  double nu = 1.0;
  double chi = 1.0;
  double gamma = 0.0;
  double epsilon = 0.1;
  bool nonlinear = true;

  std::string forcing;            // paths, resolved against the config file
  std::string velocity_boundary;
  std::string magnetic_boundary;

  Strategy strategy = Strategy::NewtonPoincare;
  double tol_fp = 1e-9;
  int n_steps = 1024;
  int n_t = 64;
  int max_periods = 200;
  int max_newton = 30;
  int max_picard = 200;
  double growth_limit = 1e6;
  int max_rejections = 6;
  std::uint64_t seed = 1;
  std::string cross_check;  // second strategy for the uniqueness gap, empty: off

  int probe_trials = 100;
  int decay_periods = 10;   // 0 disables the contraction probe
  double decay_size = 1e-3;
  bool drift_check = false;
  std::string orbit;        // saved orbit for `verify`, default <dir>/orbit.csv

  std::vector<int> k_list = {8, 16, 32, 64};

  std::string dir = "out";
  std::string cache_dir;

  std::filesystem::path base_dir;  // directory of the config file

  SolverConfig solver_config() const;
  void validate() const;
};

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);

/// "section.key=value" with the same value syntax as the file.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Sorted "section.key = value" lines of every field (paths resolved).
std::vector<std::pair<std::string, std::string>> config_fields(const RunConfig& cfg);
std::string canonical_config(const RunConfig& cfg);
/// SHA-256 of the canonical text, with input files entering through their
/// contents rather than their paths.
std::string config_hash(const RunConfig& cfg);

}  // namespace mhdp
