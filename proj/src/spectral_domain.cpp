#include "mhdp/spectral_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mhdp/errors.hpp"
#include "mhdp/hashing.hpp"
#include "mhdp/quadrature.hpp"

namespace mhdp {

void DomainSpec::validate() const {
  if (!(length_x > 0.0)) throw Error(ErrorKind::InvalidArgument, "length_x must be positive");
  if (!(wall_gap > 0.0)) throw Error(ErrorKind::InvalidArgument, "wall_gap must be positive");
  if (n_x < 2 || n_x % 2 != 0) throw Error(ErrorKind::InvalidArgument, "n_x must be even and >= 2");
  if (n_y < 2) throw Error(ErrorKind::InvalidArgument, "n_y must be >= 2");
}

std::uint64_t DomainSpec::hash() const {
  return Fnv64().str("domain").f64(length_x).f64(wall_gap).i64(n_x).i64(n_y).value();
}

std::shared_ptr<const Grid> make_grid(const DomainSpec& domain) {
  domain.validate();
  auto g = std::make_shared<Grid>();
  g->length_x = domain.length_x;
  g->wall_gap = domain.wall_gap;
  const double h_min = domain.wall_gap / (double(domain.n_y) * domain.n_y);
  const Rule1d rule = graded_wall_rule(domain.wall_gap, h_min, 3 * domain.n_y / 2 + 4);
  g->y = rule.nodes;
  g->wy = rule.weights;
  g->nx = 2 * domain.n_x;
  g->id = Fnv64().str("grid").i64(static_cast<std::int64_t>(domain.hash())).value();
  return g;
}

namespace {

// Dirichlet basis P_n - P_{n+2} and clamped basis
// P_n - 2(2n+5)/(2n+7) P_{n+2} + (2n+3)/(2n+7) P_{n+4}, with s-derivatives.
void shen_values(int m, int n_y, const LegendreTable& t, Eigen::MatrixXd& f) {
  f.resize(n_y, 3);
  for (int n = 0; n < n_y; ++n) {
    if (m == 0) {
      f(n, 0) = t.p[n] - t.p[n + 2];
      f(n, 1) = t.dp[n] - t.dp[n + 2];
      f(n, 2) = t.ddp[n] - t.ddp[n + 2];
    } else {
      const double a = -2.0 * (2 * n + 5) / (2 * n + 7.0);
      const double b = (2 * n + 3) / (2 * n + 7.0);
      f(n, 0) = t.p[n] + a * t.p[n + 2] + b * t.p[n + 4];
      f(n, 1) = t.dp[n] + a * t.dp[n + 2] + b * t.dp[n + 4];
      f(n, 2) = t.ddp[n] + a * t.ddp[n + 2] + b * t.ddp[n + 4];
    }
  }
}

std::vector<StokesMode> block_modes(const DomainSpec& d, int m) {
  const int n = d.n_y;
  const double c = 2.0 / d.wall_gap;
  const double jac = 0.5 * d.wall_gap;
  const double kappa = 2.0 * std::numbers::pi * m / d.length_x;
  const double k2 = kappa * kappa;
  const Rule1d rule = gauss_legendre(n + 6);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n), M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd f;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    shen_values(m, n, legendre(n + 4, rule.nodes[q]), f);
    const double w = rule.weights[q] * jac;
    const Eigen::VectorXd f0 = f.col(0), f1 = c * f.col(1), f2 = c * c * f.col(2);
    if (m == 0) {
      K.noalias() += w * f1 * f1.transpose();
      M.noalias() += w * f0 * f0.transpose();
    } else {
      K.noalias() += w * (f2 * f2.transpose() + 2.0 * k2 * f1 * f1.transpose() +
                          k2 * k2 * f0 * f0.transpose());
      M.noalias() += w * (f1 * f1.transpose() + k2 * f0 * f0.transpose());
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::EigSolveFailure, "Stokes block m=" + std::to_string(m));
  const double norm = std::sqrt((m == 0 ? 1.0 : 2.0) / d.length_x);
  std::vector<StokesMode> out;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(i) * norm;
    // Sign convention: largest-magnitude coefficient positive.
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    const double lam = es.eigenvalues()(i);
    if (!(lam > 0.0) || !std::isfinite(lam))
      throw Error(ErrorKind::EigSolveFailure, "nonpositive Stokes eigenvalue");
    out.push_back({lam, m, 0, v});
    if (m > 0) out.push_back({lam, m, 1, v});
  }
  return out;
}

Harmonic mode_harmonic(const StokesMode& mode, const DomainSpec& d, const Grid& g,
                       const std::vector<Eigen::MatrixXd>& tables) {
  Harmonic h;
  h.m = mode.m;
  const std::size_t ny = g.ny();
  h.vx.assign(ny, 0.0);
  h.vy.assign(ny, 0.0);
  h.dvx.assign(ny, 0.0);
  h.dvy.assign(ny, 0.0);
  const double c = 2.0 / d.wall_gap;
  const double kappa = g.wavenumber(mode.m);
  const cplx phase = mode.parity == 0 ? cplx(1.0, 0.0) : cplx(0.0, -1.0);
  for (std::size_t i = 0; i < ny; ++i) {
    const Eigen::MatrixXd& f = tables[i];
    const double p0 = mode.coef.dot(f.col(0));
    const double p1 = c * mode.coef.dot(f.col(1));
    if (mode.m == 0) {
      h.vx[i] = p0;
      h.dvx[i] = p1;
    } else {
      const double p2 = c * c * mode.coef.dot(f.col(2));
      const cplx mik(0.0, -kappa);
      h.vx[i] = phase * p1;
      h.vy[i] = mik * phase * p0;
      h.dvx[i] = phase * p2;
      h.dvy[i] = mik * phase * p1;
    }
  }
  return h;
}

}  // namespace

std::array<double, 3> mode_profile(const StokesMode& mode, const DomainSpec& domain, double y) {
  const double s = 2.0 * y / domain.wall_gap - 1.0;
  Eigen::MatrixXd f;
  shen_values(mode.m, domain.n_y, legendre(domain.n_y + 4, s), f);
  const double c = 2.0 / domain.wall_gap;
  return {mode.coef.dot(f.col(0)), c * mode.coef.dot(f.col(1)), c * c * mode.coef.dot(f.col(2))};
}

std::vector<StokesMode> stokes_spectrum(const DomainSpec& domain) {
  domain.validate();
  std::vector<StokesMode> all;
  for (int m = 0; m < domain.n_x / 2; ++m) {
    auto block = block_modes(domain, m);
    all.insert(all.end(), block.begin(), block.end());
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const StokesMode& a, const StokesMode& b) { return a.lambda < b.lambda; });
  return all;
}

StokesBasis::StokesBasis(DomainSpec domain, std::shared_ptr<const Grid> grid,
                         std::vector<StokesMode> modes)
    : domain_(domain), grid_(std::move(grid)), modes_(std::move(modes)) {
  std::vector<Eigen::MatrixXd> tables(grid_->ny());
  for (std::size_t i = 0; i < grid_->ny(); ++i) {
    const double s = 2.0 * grid_->y[i] / domain_.wall_gap - 1.0;
    shen_values(0, domain_.n_y, legendre(domain_.n_y + 4, s), tables[i]);
  }
  std::vector<Eigen::MatrixXd> clamped(grid_->ny());
  for (std::size_t i = 0; i < grid_->ny(); ++i) {
    const double s = 2.0 * grid_->y[i] / domain_.wall_gap - 1.0;
    shen_values(1, domain_.n_y, legendre(domain_.n_y + 4, s), clamped[i]);
  }
  Fnv64 h;
  h.str("basis").i64(static_cast<std::int64_t>(domain_.hash()));
  for (const StokesMode& mode : modes_) {
    ChannelField f(grid_);
    f.harmonics().push_back(mode_harmonic(mode, domain_, *grid_, mode.m == 0 ? tables : clamped));
    fields_.push_back(std::move(f));
    h.f64(mode.lambda).i64(mode.m).i64(mode.parity);
  }
  id_ = h.value();
}

Eigen::VectorXd StokesBasis::lambdas() const {
  Eigen::VectorXd l(k());
  for (std::size_t j = 0; j < k(); ++j) l(j) = modes_[j].lambda;
  return l;
}

ChannelField StokesBasis::reconstruct(const Eigen::VectorXd& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != k())
    throw Error(ErrorKind::InvalidArgument, "coefficient length does not match basis");
  ChannelField out(grid_);
  for (std::size_t j = 0; j < k(); ++j)
    if (coeffs(j) != 0.0) out.add_scaled(coeffs(j), fields_[j]);
  return out;
}

Eigen::VectorXd StokesBasis::project(const ChannelField& f) const {
  Eigen::VectorXd c(k());
  for (std::size_t j = 0; j < k(); ++j) c(j) = inner(f, fields_[j]);
  return c;
}

double StokesBasis::wall_trace(std::size_t j) const {
  const StokesMode& mode = modes_[j];
  const double kappa = grid_->wavenumber(mode.m);
  double worst = 0.0;
  for (double y : {0.0, domain_.wall_gap}) {
    const auto p = mode_profile(mode, domain_, y);
    const double mag = mode.m == 0 ? std::abs(p[0]) : std::hypot(p[1], kappa * p[0]);
    worst = std::max(worst, mag);
  }
  return worst;
}

StokesBasis build_basis(const DomainSpec& domain, int k) {
  domain.validate();
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be positive");
  if (k > domain.capacity())
    throw Error(ErrorKind::DiscretizationTooSmall,
                "k=" + std::to_string(k) + " exceeds capacity " + std::to_string(domain.capacity()));
  auto all = stokes_spectrum(domain);
  all.resize(k);
  return StokesBasis(domain, make_grid(domain), std::move(all));
}

StokesBasis basis_from_modes(const DomainSpec& domain, std::vector<StokesMode> modes) {
  if (modes.empty()) throw Error(ErrorKind::InvalidArgument, "empty mode list");
  return StokesBasis(domain, make_grid(domain), std::move(modes));
}

SpectralField leray_project(const ChannelField& field, const StokesBasis& basis) {
  if (!field.empty() && field.grid().id != basis.grid().id)
    throw Error(ErrorKind::GridMismatch, "field is not on the basis grid");
  return {basis.project(field), basis.id()};
}

SpectralField leray_project(const GridField& field, const StokesBasis& basis) {
  if (!field.grid || field.grid->id != basis.grid().id)
    throw Error(ErrorKind::GridMismatch, "field is not on the basis grid");
  for (double v : field.values)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite grid sample");
  return {basis.project(analyze(field)), basis.id()};
}

SpectralField frac_power_apply(double gamma, const SpectralField& u, const StokesBasis& basis) {
  if (u.basis_id != basis.id()) throw Error(ErrorKind::GridMismatch, "field belongs to another basis");
  if (!std::isfinite(gamma)) throw Error(ErrorKind::InvalidArgument, "gamma must be finite");
  SpectralField out = u;
  for (std::size_t j = 0; j < basis.k(); ++j) out.coeffs(j) *= std::pow(basis.lambda(j), gamma);
  return out;
}

double frac_norm(const Eigen::VectorXd& coeffs, const StokesBasis& basis, double s) {
  double sum = 0.0;
  for (std::size_t j = 0; j < basis.k(); ++j)
    sum += std::pow(basis.lambda(j), 2.0 * s) * coeffs(j) * coeffs(j);
  return std::sqrt(sum);
}

NormReport norms(const SpectralField& u, const StokesBasis& basis, double gamma) {
  NormReport r;
  r.l2 = u.coeffs.norm();
  r.grad = frac_norm(u.coeffs, basis, 0.5);
  r.a = frac_norm(u.coeffs, basis, 1.0);
  r.a_gamma = frac_norm(u.coeffs, basis, gamma);
  if (r.l2 > 0.0) {
    const ChannelField f = basis.reconstruct(u.coeffs);
    r.l4 = lp_norm(f, 4.0);
    r.l1 = lp_norm(f, 1.0);
  }
  return r;
}

}  // namespace mhdp
