#include "mhdp/galerkin.hpp"

#include <cmath>
#include <numbers>

#include "mhdp/errors.hpp"
#include "mhdp/parallel.hpp"

namespace mhdp {

bool ForcingSpec::zero() const {
  for (const auto& t : terms)
    if (t.amplitude != 0.0) return false;
  return true;
}

namespace {

ChannelField forcing_field(const ForcingSpec& f, const std::shared_ptr<const Grid>& grid, double t,
                           bool derivative) {
  ChannelField out(grid);
  const double w = 2.0 * std::numbers::pi / f.tau;
  for (const ForcingHarmonic& h : f.terms) {
    if (h.amplitude == 0.0) continue;
    if (h.m_x >= grid->nx / 4)
      throw Error(ErrorKind::InvalidArgument, "forcing harmonic m_x beyond the x resolution");
    cplx a = std::polar(h.amplitude, w * h.m_t * t + h.phase);
    if (derivative) a *= cplx(0.0, w * h.m_t);
    Harmonic& hm = out.at(h.m_x, false);
    auto& dst = h.component == 0 ? hm.vx : hm.vy;
    for (std::size_t i = 0; i < grid->ny(); ++i)
      dst[i] += a * std::sin(h.p_y * std::numbers::pi * grid->y[i] / grid->wall_gap);
  }
  if (out.find(0)) {
    Harmonic& h0 = out.at(0, false);
    for (auto& z : h0.vx) z = z.real();
    for (auto& z : h0.vy) z = z.real();
  }
  return out;
}

Eigen::MatrixXd coupling_matrix(const StokesBasis& basis, const ChannelField& b, bool first) {
  const int k = static_cast<int>(basis.k());
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(k, k);
  if (b.empty()) return N;
  for (int i = 0; i < k; ++i) {
    const ChannelField adv = first ? advect(basis.field(i), b) : advect(b, basis.field(i));
    for (int l = 0; l < k; ++l) N(l, i) = inner(adv, basis.field(l));
  }
  return N;
}

Eigen::VectorXd project_or_zero(const StokesBasis& basis, const ChannelField& f) {
  if (f.empty()) return Eigen::VectorXd::Zero(basis.k());
  return basis.project(f);
}

Eigen::VectorXd grad_project(const StokesBasis& basis, const ChannelField& f) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.k());
  if (f.empty()) return v;
  for (std::size_t j = 0; j < basis.k(); ++j) v(j) = grad_inner(f, basis.field(j));
  return v;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, int k) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), k, k);
}

}  // namespace

ChannelField ForcingSpec::at(const std::shared_ptr<const Grid>& grid, double t) const {
  return forcing_field(*this, grid, t, false);
}

ChannelField ForcingSpec::dt_at(const std::shared_ptr<const Grid>& grid, double t) const {
  return forcing_field(*this, grid, t, true);
}

ForcingNorms forcing_norms(const ForcingSpec& f, const std::shared_ptr<const Grid>& grid, int n_t) {
  ForcingNorms n;
  if (f.zero()) return n;
  double s0 = 0.0, s1 = 0.0;
  for (int j = 0; j < n_t; ++j) {
    const double t = f.tau * j / n_t;
    const ChannelField v = f.at(grid, t);
    const ChannelField vt = f.dt_at(grid, t);
    n.M = std::max(n.M, lp_norm(v, 1.0));
    const double l2 = inner(v, v);
    n.sup_l2 = std::max(n.sup_l2, std::sqrt(l2));
    s0 += l2;
    s1 += vt.empty() ? 0.0 : inner(vt, vt);
  }
  n.M0 = std::sqrt(s0 * f.tau / n_t);
  n.M1 = std::sqrt(s1 * f.tau / n_t);
  return n;
}

GalerkinSystem assemble(const StokesBasis& basis, const ExtensionField& B1, const ExtensionField& B2,
                        const ForcingSpec& f, const ModelParams& params, const AssemblyOptions& opt) {
  if (!(params.alpha > 0.0) || !(params.nu > 0.0) || !(params.chi > 0.0))
    throw Error(ErrorKind::NonpositiveCoefficient, "alpha, nu and chi must be positive");
  for (const ExtensionField* B : {&B1, &B2}) {
    if (B->grid && B->grid->id != basis.grid().id)
      throw Error(ErrorKind::GridMismatch, "extension built on another grid");
  }
  if (opt.n_t < 2) throw Error(ErrorKind::InvalidArgument, "n_t must be >= 2");
  const int k = static_cast<int>(basis.k());
  GalerkinSystem sys;
  sys.k = k;
  sys.tau = f.tau;
  sys.params = params;
  sys.nonlinear = opt.nonlinear;
  sys.lambda = basis.lambdas();
  sys.n_t = opt.n_t;
  for (const ExtensionField* B : {&B1, &B2}) {
    if (!B->zero() && std::abs(B->tau - f.tau) > 1e-14 * f.tau)
      throw Error(ErrorKind::InvalidArgument, "extension and forcing periods differ");
  }

  if (opt.nonlinear) {
    sys.T.assign(static_cast<std::size_t>(k) * k * k, 0.0);
    parallel_for(k, [&](int i) {
      for (int j = 0; j < k; ++j) {
        const ChannelField adv = advect(basis.field(i), basis.field(j));
        for (int l = 0; l < k; ++l)
          sys.T[(static_cast<std::size_t>(i) * k + j) * k + l] = inner(adv, basis.field(l));
      }
    });
    double tmax = 0.0;
    for (double v : sys.T) tmax = std::max(tmax, std::abs(v));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l) {
          const double v = sys.tensor(i, j, l);
          if (std::abs(v) > 1e-15 * tmax) sys.t_nz.push_back({i, j, l, v});
        }
  }

  const int n_t = opt.n_t;
  const auto grid = basis.grid_ptr();
  const bool b_steady = B1.steady() && B2.steady();
  const bool b_zero = B1.zero() && B2.zero();
  const char* vec_names[] = {"B1t", "AB1", "B1B1", "B2B2", "B2B1", "B1B2", "B2t", "AB2", "F"};
  const char* mat_names[] = {"N1B1", "N2B1", "N1B2", "N2B2"};
  for (const char* n : vec_names) sys.vec_terms[n] = Eigen::MatrixXd::Zero(k, n_t);
  for (const char* n : mat_names) sys.mat_terms[n].assign(n_t, Eigen::MatrixXd::Zero(k, k));

  parallel_for(n_t, [&](int j) {
    const double t = f.tau * j / n_t;
    sys.vec_terms.at("F").col(j) = project_or_zero(basis, f.at(grid, t));
    if (b_zero || (b_steady && j > 0)) return;
    const ChannelField b1 = B1.zero() ? ChannelField(grid) : B1.at(t);
    const ChannelField b2 = B2.zero() ? ChannelField(grid) : B2.at(t);
    auto& V = sys.vec_terms;
    if (!B1.steady()) V.at("B1t").col(j) = project_or_zero(basis, B1.dt_at(t));
    if (!B2.steady()) V.at("B2t").col(j) = project_or_zero(basis, B2.dt_at(t));
    V.at("AB1").col(j) = grad_project(basis, b1);
    V.at("AB2").col(j) = grad_project(basis, b2);
    V.at("B1B1").col(j) = project_or_zero(basis, advect(b1, b1));
    V.at("B2B2").col(j) = project_or_zero(basis, advect(b2, b2));
    V.at("B2B1").col(j) = project_or_zero(basis, advect(b2, b1));
    V.at("B1B2").col(j) = project_or_zero(basis, advect(b1, b2));
    auto& N = sys.mat_terms;
    N.at("N1B1")[j] = coupling_matrix(basis, b1, true);
    N.at("N2B1")[j] = coupling_matrix(basis, b1, false);
    N.at("N1B2")[j] = coupling_matrix(basis, b2, true);
    N.at("N2B2")[j] = coupling_matrix(basis, b2, false);
  });
  if (b_steady && !b_zero) {
    for (auto& [name, m] : sys.vec_terms)
      if (name != "F")
        for (int j = 1; j < n_t; ++j) m.col(j) = m.col(0);
    for (auto& [name, v] : sys.mat_terms)
      for (int j = 1; j < n_t; ++j) v[j] = v[0];
  }

  const double a = params.alpha, nu = params.nu, chi = params.chi;
  const auto& V = sys.vec_terms;
  const auto& N = sys.mat_terms;
  Eigen::MatrixXd gu(k, n_t), gh(k, n_t);
  Eigen::MatrixXd uc(k * k, n_t), ud(k * k, n_t), hc(k * k, n_t), hd(k * k, n_t);
  for (int j = 0; j < n_t; ++j) {
    gu.col(j) = a * V.at("F").col(j) - a * V.at("B1t").col(j) - nu * V.at("AB1").col(j) -
                a * V.at("B1B1").col(j) + V.at("B2B2").col(j);
    gh.col(j) = -V.at("B2t").col(j) - chi * V.at("AB2").col(j) + V.at("B2B1").col(j) - V.at("B1B2").col(j);
    uc.col(j) = flatten(-(N.at("N1B1")[j] + N.at("N2B1")[j]));
    ud.col(j) = flatten(N.at("N1B2")[j] + N.at("N2B2")[j]);
    hc.col(j) = flatten(N.at("N2B2")[j] - N.at("N1B2")[j]);
    hd.col(j) = flatten(N.at("N1B1")[j] - N.at("N2B1")[j]);
  }
  sys.g_u = PeriodicSeries(f.tau, gu);
  sys.g_h = PeriodicSeries(f.tau, gh);
  sys.ju_c = PeriodicSeries(f.tau, uc);
  sys.ju_d = PeriodicSeries(f.tau, ud);
  sys.jh_c = PeriodicSeries(f.tau, hc);
  sys.jh_d = PeriodicSeries(f.tau, hd);
  sys.forcing = PeriodicSeries(f.tau, V.at("F"));
  return sys;
}

Eigen::VectorXd quadratic(const GalerkinSystem& sys, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(sys.k);
  for (const auto& e : sys.t_nz) q(e.l) += e.v * a(e.i) * b(e.j);
  return q;
}

namespace {

void add_coupling(Eigen::VectorXd& out, const PeriodicSeries& s, double t, const Eigen::VectorXd& x, int k) {
  if (s.is_zero()) return;
  const Eigen::VectorXd flat = s(t);
  out.noalias() += Eigen::Map<const Eigen::MatrixXd>(flat.data(), k, k) * x;
}

}  // namespace

Rhs rhs_linearized(const GalerkinSystem& sys, double t, const Eigen::VectorXd& v, const Eigen::VectorXd& b) {
  const int k = sys.k;
  if (v.size() != k || b.size() != k) throw Error(ErrorKind::InvalidArgument, "state length mismatch");
  Rhs r;
  r.u = sys.g_u.is_zero() ? Eigen::VectorXd::Zero(k) : sys.g_u(t);
  r.h = sys.g_h.is_zero() ? Eigen::VectorXd::Zero(k) : sys.g_h(t);
  if (sys.nonlinear) {
    r.u += -sys.params.alpha * quadratic(sys, v, v) + quadratic(sys, b, b);
    r.h += -quadratic(sys, v, b) + quadratic(sys, b, v);
  }
  add_coupling(r.u, sys.ju_c, t, v, k);
  add_coupling(r.u, sys.ju_d, t, b, k);
  add_coupling(r.h, sys.jh_c, t, v, k);
  add_coupling(r.h, sys.jh_d, t, b, k);
  return r;
}

Rhs rhs_nonlinear(const GalerkinSystem& sys, double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
  Rhs r = rhs_linearized(sys, t, c, d);
  r.u -= sys.params.nu * sys.lambda.cwiseProduct(c);
  r.h -= sys.params.chi * sys.lambda.cwiseProduct(d);
  return r;
}

Eigen::MatrixXd jacobian(const GalerkinSystem& sys, double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
  const int k = sys.k;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  auto uc = J.block(0, 0, k, k);
  auto ud = J.block(0, k, k, k);
  auto hc = J.block(k, 0, k, k);
  auto hd = J.block(k, k, k, k);
  uc.diagonal() -= sys.params.nu * sys.lambda;
  hd.diagonal() -= sys.params.chi * sys.lambda;
  if (sys.nonlinear) {
    const double a = sys.params.alpha;
    for (const auto& e : sys.t_nz) {
      // Q(x, y)_l = T_ijl x_i y_j.
      uc(e.l, e.i) -= a * e.v * c(e.j);
      uc(e.l, e.j) -= a * e.v * c(e.i);
      ud(e.l, e.i) += e.v * d(e.j);
      ud(e.l, e.j) += e.v * d(e.i);
      hc(e.l, e.i) -= e.v * d(e.j);  // -Q(c, d)
      hd(e.l, e.j) -= e.v * c(e.i);
      hd(e.l, e.i) += e.v * c(e.j);  // +Q(d, c)
      hc(e.l, e.j) += e.v * d(e.i);
    }
  }
  if (!sys.ju_c.is_zero()) uc += unflatten(sys.ju_c(t), k);
  if (!sys.ju_d.is_zero()) ud += unflatten(sys.ju_d(t), k);
  if (!sys.jh_c.is_zero()) hc += unflatten(sys.jh_c(t), k);
  if (!sys.jh_d.is_zero()) hd += unflatten(sys.jh_d(t), k);
  return J;
}

Eigen::VectorXd convect_on_grid(const ChannelField& F, const ChannelField& G, const StokesBasis& basis) {
  const auto grid = basis.grid_ptr();
  if (F.empty() || G.empty()) return Eigen::VectorXd::Zero(basis.k());
  ChannelField gx(grid), gy(grid);
  for (const Harmonic& h : G.harmonics()) {
    if (!h.has_dy()) throw Error(ErrorKind::InvalidArgument, "convect_on_grid needs y-derivatives of G");
    const cplx ik(0.0, grid->wavenumber(h.m));
    Harmonic& a = gx.at(h.m, false);
    Harmonic& b = gy.at(h.m, false);
    for (std::size_t i = 0; i < grid->ny(); ++i) {
      a.vx[i] = ik * h.vx[i];
      a.vy[i] = ik * h.vy[i];
      b.vx[i] = h.dvx[i];
      b.vy[i] = h.dvy[i];
    }
  }
  const GridField fs = sample(F), xs = sample(gx), ys = sample(gy);
  GridField prod = GridField::zeros(grid);
  for (std::size_t n = 0; n < prod.values.size(); ++n) {
    const std::size_t plane = static_cast<std::size_t>(grid->nx) * grid->ny();
    const std::size_t pos = n % plane;
    prod.values[n] = fs.values[pos] * xs.values[n] + fs.values[plane + pos] * ys.values[n];
  }
  return basis.project(analyze(prod));
}

Rhs rhs_nonlinear_grid(const GalerkinSystem& sys, const StokesBasis& basis, double t,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& d) {
  GalerkinSystem lin = sys;
  lin.nonlinear = false;
  Rhs r = rhs_nonlinear(lin, t, c, d);
  if (sys.nonlinear) {
    const ChannelField u = basis.reconstruct(c), h = basis.reconstruct(d);
    r.u += -sys.params.alpha * convect_on_grid(u, u, basis) + convect_on_grid(h, h, basis);
    r.h += -convect_on_grid(u, h, basis) + convect_on_grid(h, u, basis);
  }
  return r;
}

}  // namespace mhdp
