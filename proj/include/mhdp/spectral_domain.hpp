#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "mhdp/channel_field.hpp"

namespace mhdp {

/// x-periodic channel [0, length_x) x [0, wall_gap] with its discretization
/// sizes.  n_x counts Fourier modes in x (harmonics 0..n_x/2-1 are used),
/// n_y counts wall-normal polynomial modes per harmonic.
struct DomainSpec {
  double length_x = 6.283185307179586;
  double wall_gap = 1.0;
  int n_x = 16;
  int n_y = 24;

  void validate() const;
  std::uint64_t hash() const;
  /// Number of Stokes modes the discretization can represent.
  int capacity() const { return n_y * (n_x - 1); }
};

/// Builds the y quadrature and x sampling shared by every field on `domain`.
std::shared_ptr<const Grid> make_grid(const DomainSpec& domain);

/// One discrete Stokes eigenpair.  m = 0 modes are shear profiles (a(y), 0)
/// in the Dirichlet Legendre basis; m >= 1 modes come from a stream function
/// in the clamped Legendre basis, with parity 0 for cos(kappa x) and 1 for
/// sin(kappa x).
struct StokesMode {
  double lambda = 0.0;
  int m = 0;
  int parity = 0;
  Eigen::VectorXd coef;
};

/// Evaluates the y-profile of a mode and its derivatives at y.  For m >= 1
/// this is the stream function phi (so u_x = phi', u_y = -i kappa phi for
/// parity 0); for m = 0 it is the x-velocity a.  Returns {f, f', f''}.
std::array<double, 3> mode_profile(const StokesMode& mode, const DomainSpec& domain, double y);

class StokesBasis {
 public:
  StokesBasis(DomainSpec domain, std::shared_ptr<const Grid> grid, std::vector<StokesMode> modes);

  const DomainSpec& domain() const { return domain_; }
  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  std::size_t k() const { return modes_.size(); }
  const StokesMode& mode(std::size_t j) const { return modes_[j]; }
  const std::vector<StokesMode>& modes() const { return modes_; }
  /// Eigenfield omega_j on the grid, with y-derivatives.
  const ChannelField& field(std::size_t j) const { return fields_[j]; }
  double lambda(std::size_t j) const { return modes_[j].lambda; }
  Eigen::VectorXd lambdas() const;
  double lambda_min() const { return modes_.front().lambda; }
  std::uint64_t id() const { return id_; }

  /// sum_j coeffs_j omega_j.
  ChannelField reconstruct(const Eigen::VectorXd& coeffs) const;
  /// (F, omega_j) for every j.
  Eigen::VectorXd project(const ChannelField& f) const;
  /// Bound on max |omega_j| over both walls: the profile magnitude at y = 0
  /// and y = wall_gap.
  double wall_trace(std::size_t j) const;

 private:
  DomainSpec domain_;
  std::shared_ptr<const Grid> grid_;
  std::vector<StokesMode> modes_;
  std::vector<ChannelField> fields_;
  std::uint64_t id_ = 0;
};

/// All eigenpairs of every wavenumber block, sorted ascending (cos before sin
/// on ties).  The k lowest are a prefix of the list for every k.
std::vector<StokesMode> stokes_spectrum(const DomainSpec& domain);

StokesBasis build_basis(const DomainSpec& domain, int k);
/// Basis from already-computed modes (cache path).
StokesBasis basis_from_modes(const DomainSpec& domain, std::vector<StokesMode> modes);

struct SpectralField {
  Eigen::VectorXd coeffs;
  std::uint64_t basis_id = 0;
};

/// coeffs_j = (field, omega_j).  Throws GridMismatch for foreign grids.
SpectralField leray_project(const GridField& field, const StokesBasis& basis);
SpectralField leray_project(const ChannelField& field, const StokesBasis& basis);

/// coeffs_j -> lambda_j^gamma coeffs_j.
SpectralField frac_power_apply(double gamma, const SpectralField& u, const StokesBasis& basis);

struct NormReport {
  double l2 = 0.0;       // |u|
  double grad = 0.0;     // |grad u| = |A^{1/2} u|
  double a = 0.0;        // |A u|
  double a_gamma = 0.0;  // |A^gamma u|
  double l4 = 0.0;       // ||u||_{L^4}
  double l1 = 0.0;       // ||u||_{L^{n/2}}, n = 2
};

NormReport norms(const SpectralField& u, const StokesBasis& basis, double gamma);

/// |A^s u| from coefficients.
double frac_norm(const Eigen::VectorXd& coeffs, const StokesBasis& basis, double s);

}  // namespace mhdp
