#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "mhdp/channel_field.hpp"
#include "mhdp/harmonic_file.hpp"
#include "mhdp/spectral_domain.hpp"

namespace mhdp {

struct OutflowCertificate {
  std::vector<double> times;
  std::array<std::vector<double>, 2> wall_flux;  // integral of beta . n per wall
  std::vector<double> total_flux;
  bool goc_ok = true;
  bool soc_ok = true;
  double tol = 0.0;
};

/// Flux of the outward normal data through each wall at n_t sample times.
OutflowCertificate check_outflow(const BoundaryData& beta, double length_x, double tol, int n_t = 64);

/// Cutoff profile of the lift: 1 for d <= inner_radius, 0 for d >= delta,
/// and a quintic smoothstep in log(delta / d) between.  Returns {z, z', z''}
/// with respect to d.
std::array<double, 3> log_cutoff(double d, double delta, double log_span);

/// Stream-function lift of one boundary harmonic (or of several sharing m,
/// m_t): psi = z(y)(g_b + y u_b) + z(gap - y)(g_t - (gap - y) u_t), all
/// complex amplitudes of exp(i kappa_m x) for a unit time factor.
struct LiftTerm {
  int m = 0;
  int m_t = 0;
  cplx g_bottom, u_bottom, g_top, u_top;
};

class ExtensionField {
 public:
  ExtensionField() = default;

  double epsilon = 0.0;
  double delta = 0.0;         // outer edge of the layer
  double log_span = 1.0;      // log(delta / inner_radius)
  double inner_radius = 0.0;  // layer core where the cutoff is 1
  double tau = 1.0;
  int n_t = 64;
  std::shared_ptr<const Grid> grid;
  std::vector<LiftTerm> terms;

  bool zero() const { return terms.empty(); }
  bool steady() const;
  double sample_time(int j) const { return tau * j / n_t; }

  /// Lift at time t on the grid (with y-derivatives).
  ChannelField at(double t) const;
  /// Time derivative of the lift at t, taken on the Fourier-in-t
  /// representation.
  ChannelField dt_at(double t) const;
  /// Velocity of harmonic m at height y (any y in [0, gap]), time t:
  /// {vx, vy} complex amplitudes of exp(i kappa_m x).
  std::array<cplx, 2> profile_at(int m, double y, double t) const;
};

/// Builds the solenoidal lift of beta whose convective form against
/// no-slip fields is bounded by epsilon |grad u|^2 (Hardy-inequality
/// design).  Throws SOCViolated when some wall carries net flux and
/// EpsilonUnreachable when the layer core falls below the grid resolution.
ExtensionField build_extension(const BoundaryData& beta, double epsilon, const StokesBasis& basis,
                               int n_t = 64);

/// Smallest epsilon whose layer is resolvable on `basis`'s grid.
double min_reachable_epsilon(const BoundaryData& beta, const StokesBasis& basis);

/// Max over walls, x samples and sample times of |B - beta| on the wall.
double trace_error(const ExtensionField& B, const BoundaryData& beta);

struct NormSample {
  double l2 = 0.0;        // |B|
  double dt = 0.0;        // |B_t|
  double l4 = 0.0;        // ||B||_{L^4}
  double grad = 0.0;      // |grad B|
  double a = 0.0;         // |A B|
  double a_gamma = 0.0;   // |A^gamma B|
  double a_3g2 = 0.0;     // |A^{3 gamma / 2} B|
  double a_ghalf = 0.0;   // |A^{(2 gamma + 1)/2} B|
  double div = 0.0;       // discrete divergence L2 norm
};

struct NormTable {
  std::vector<NormSample> samples;  // one per sample time
  NormSample sup;                   // period suprema
};

/// Fractional powers of A act on the Galerkin projection of B.
NormTable extension_norm_table(const ExtensionField& B, const StokesBasis& basis, double gamma);

struct HopfReport {
  double epsilon = 0.0;
  double span_sup = 0.0;    // exact sup over span(basis), all sample times
  double basis_max = 0.0;   // max over basis fields
  double random_max = 0.0;  // max over random fields
  int n_random = 0;

  double max_ratio() const { return std::max({span_sup, basis_max, random_max}); }
};

/// Measures |((u . grad) B, u)| / |grad u|^2 over the basis fields, n_random
/// random fields of span(basis), and the exact supremum over the span
/// (generalized eigenvalue of the symmetric part).
HopfReport hopf_certificate(const ExtensionField& B, const StokesBasis& basis, int n_random,
                            std::uint64_t seed);

}  // namespace mhdp
