#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mhdp {

using cplx = std::complex<double>;

/// Tensor quadrature of the periodic channel [0, length_x) x [0, wall_gap].
/// The x direction is carried analytically by Fourier harmonics; `nx`
/// physical points are used only where pointwise values are needed
/// (L^p norms, GridField sampling).
struct Grid {
  double length_x = 0.0;
  double wall_gap = 0.0;
  std::vector<double> y;   // composite Gauss nodes in [0, wall_gap]
  std::vector<double> wy;  // matching weights
  int nx = 0;              // physical x samples (trapezoid)
  std::uint64_t id = 0;    // fingerprint of the construction parameters

  std::size_t ny() const { return y.size(); }
  double wavenumber(int m) const;
  std::vector<double> x_points() const;
};

/// One x-harmonic of a real vector field: the field contributes
/// Re(profile(y) * exp(i*kappa_m*x)) to each component.  For m = 0 the
/// profiles are real.  `dx`/`dy` hold d/dy of the x and y components and may
/// be empty when the field was produced by a product.
struct Harmonic {
  int m = 0;
  std::vector<cplx> vx, vy;
  std::vector<cplx> dvx, dvy;

  bool has_dy() const { return !dvx.empty(); }
};

/// Real divergence-free-or-not vector field on the channel stored as a sparse
/// list of x-harmonics with y-profiles sampled on the grid quadrature.
class ChannelField {
 public:
  ChannelField() = default;
  explicit ChannelField(std::shared_ptr<const Grid> grid) : grid_(std::move(grid)) {}

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const std::vector<Harmonic>& harmonics() const { return harm_; }
  std::vector<Harmonic>& harmonics() { return harm_; }

  /// Returns the harmonic with wavenumber index m, creating a zero one.
  Harmonic& at(int m, bool with_dy);
  const Harmonic* find(int m) const;
  bool empty() const { return harm_.empty(); }

  /// this += a * other.
  void add_scaled(double a, const ChannelField& other);
  void scale(double a);

  /// Pointwise evaluation (x, y component); y must be a grid node index.
  std::pair<double, double> value(double x, std::size_t iy) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<Harmonic> harm_;  // sorted by m
};

/// L2 inner product (F, G) over the channel.
double inner(const ChannelField& f, const ChannelField& g);
/// (grad F, grad G) summed over components; both need y-derivatives.
double grad_inner(const ChannelField& f, const ChannelField& g);
/// (F . grad) G.  G needs y-derivatives; the result carries none.
ChannelField advect(const ChannelField& f, const ChannelField& g);
/// Divergence samples of a field with y-derivatives, returned as its L2 norm.
double divergence_l2(const ChannelField& f);
/// Lp norm of |F| (Euclidean magnitude) by tensor quadrature on the
/// physical x grid.
double lp_norm(const ChannelField& f, double p);
/// Physical samples on the nx-by-ny grid, component-major:
/// values[(c * nx + ix) * ny + iy].
struct GridField {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;

  static GridField zeros(std::shared_ptr<const Grid> grid);
  double& at(int comp, int ix, std::size_t iy);
  double at(int comp, int ix, std::size_t iy) const;
};

/// Samples a ChannelField on the physical grid.
GridField sample(const ChannelField& f);
/// Trapezoid-in-x analysis of a GridField into harmonics 0..nx/2-1.
ChannelField analyze(const GridField& g);

}  // namespace mhdp
