#include "mhdp/boundary_extension.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "mhdp/errors.hpp"

namespace mhdp {

namespace {

constexpr double kSlopeMax = 1.875;  // max of the smoothstep derivative 30 s^2 (1-s)^2

double omega(double tau) { return 2.0 * std::numbers::pi / tau; }

double kappa(double length_x, int m) { return 2.0 * std::numbers::pi * m / length_x; }

struct LayerSizes {
  double g_sum = 0.0;   // sum |g|
  double gx_sum = 0.0;  // sum kappa |g|
  double u_sum = 0.0;   // sum |u|
  double ux_sum = 0.0;  // sum kappa |u|
};

LayerSizes layer_sizes(const BoundaryData& beta, double length_x) {
  LayerSizes s;
  for (const auto& wall : beta.walls) {
    for (const WallHarmonic& h : wall) {
      const double a = std::abs(h.amplitude);
      const double k = kappa(length_x, h.m_x);
      if (h.component == WallHarmonic::Tangential) {
        s.u_sum += a;
        s.ux_sum += k * a;
      } else if (h.m_x > 0) {
        s.g_sum += a / k;
        s.gx_sum += a;
      }
    }
  }
  return s;
}

struct Layout {
  double delta, log_span, inner;
};

// Hardy: |((u . grad) B, u)| <= 2 sup(d |B|) |grad u|^2 per wall layer.  The
// stream-function offset g contributes 2 * 1.875 g / log_span, the rest is
// O(delta); each share is held to epsilon / 2.
Layout layout_for(const LayerSizes& s, double epsilon, double gap) {
  Layout l;
  l.log_span = std::max(1.0, 4.0 * kSlopeMax * s.g_sum / epsilon);
  const double b = kSlopeMax * s.u_sum / l.log_span + s.u_sum + s.gx_sum;
  const double target = epsilon / 4.0;
  double delta;
  if (s.ux_sum > 0.0) {
    delta = (-b + std::sqrt(b * b + 4.0 * s.ux_sum * target)) / (2.0 * s.ux_sum);
  } else if (b > 0.0) {
    delta = target / b;
  } else {
    delta = 0.25 * gap;
  }
  l.delta = std::min(delta, 0.25 * gap);
  l.inner = l.delta * std::exp(-l.log_span);
  return l;
}

double resolution_floor(const StokesBasis& basis) {
  const double n = basis.domain().n_y;
  return basis.domain().wall_gap / (n * n);
}

void require_soc(const BoundaryData& beta, double length_x) {
  const OutflowCertificate cert = check_outflow(beta, length_x, 1e-12);
  if (!cert.soc_ok) throw Error(ErrorKind::SOCViolated, "a wall carries nonzero net flux");
}

// {psi, psi', psi''} of a lift term at y.
std::array<cplx, 3> stream_profile(const LiftTerm& t, double y, double gap, double delta,
                                   double log_span) {
  std::array<cplx, 3> out{};
  if (y < delta) {
    const auto z = log_cutoff(y, delta, log_span);
    const cplx p = t.g_bottom + y * t.u_bottom;
    out[0] += z[0] * p;
    out[1] += z[1] * p + z[0] * t.u_bottom;
    out[2] += z[2] * p + 2.0 * z[1] * t.u_bottom;
  }
  const double d = gap - y;
  if (d < delta) {
    const auto z = log_cutoff(d, delta, log_span);
    const cplx q = t.g_top - d * t.u_top;
    out[0] += z[0] * q;
    out[1] += -z[1] * q + z[0] * t.u_top;
    out[2] += z[2] * q - 2.0 * z[1] * t.u_top;
  }
  return out;
}

}  // namespace

OutflowCertificate check_outflow(const BoundaryData& beta, double length_x, double tol, int n_t) {
  OutflowCertificate c;
  c.tol = tol;
  const double w = omega(beta.tau);
  for (int j = 0; j < n_t; ++j) {
    const double t = beta.tau * j / n_t;
    double total = 0.0;
    for (int wall = 0; wall < 2; ++wall) {
      double flux = 0.0;
      for (const WallHarmonic& h : beta.walls[wall]) {
        if (h.component != WallHarmonic::Normal || h.m_x != 0) continue;
        flux += length_x * h.amplitude * std::cos(w * h.m_t * t + h.phase);
      }
      c.wall_flux[wall].push_back(flux);
      if (std::abs(flux) > tol) c.soc_ok = false;
      total += flux;
    }
    c.times.push_back(t);
    c.total_flux.push_back(total);
    if (std::abs(total) > tol) c.goc_ok = false;
  }
  return c;
}

std::array<double, 3> log_cutoff(double d, double delta, double log_span) {
  if (d >= delta) return {0.0, 0.0, 0.0};
  const double r = delta * std::exp(-log_span);
  if (d <= r) return {1.0, 0.0, 0.0};
  const double s = std::log(delta / d) / log_span;
  const double S = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
  const double S1 = 30.0 * s * s * (1.0 - s) * (1.0 - s);
  const double S2 = 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
  const double ds = -1.0 / (log_span * d);
  const double dds = 1.0 / (log_span * d * d);
  return {S, S1 * ds, S2 * ds * ds + S1 * dds};
}

bool ExtensionField::steady() const {
  for (const LiftTerm& t : terms)
    if (t.m_t != 0) return false;
  return true;
}

std::array<cplx, 2> ExtensionField::profile_at(int m, double y, double t) const {
  std::array<cplx, 2> v{};
  const double w = omega(tau);
  for (const LiftTerm& term : terms) {
    if (term.m != m) continue;
    const cplx e = std::polar(1.0, w * term.m_t * t);
    const auto p = stream_profile(term, y, grid->wall_gap, delta, log_span);
    const cplx mik(0.0, -grid->wavenumber(m));
    v[0] += e * p[1];
    v[1] += e * mik * p[0];
  }
  if (m == 0) {
    v[0] = v[0].real();
    v[1] = 0.0;
  }
  return v;
}

namespace {

ChannelField assemble_lift(const ExtensionField& B, double t, bool derivative) {
  ChannelField out(B.grid);
  const double w = omega(B.tau);
  const Grid& g = *B.grid;
  for (const LiftTerm& term : B.terms) {
    cplx e = std::polar(1.0, w * term.m_t * t);
    if (derivative) e *= cplx(0.0, w * term.m_t);
    if (e == cplx(0.0, 0.0)) continue;
    Harmonic& h = out.at(term.m, true);
    const cplx mik(0.0, -g.wavenumber(term.m));
    for (std::size_t i = 0; i < g.ny(); ++i) {
      const double y = g.y[i];
      if (y >= B.delta && g.wall_gap - y >= B.delta) continue;
      const auto p = stream_profile(term, y, g.wall_gap, B.delta, B.log_span);
      h.vx[i] += e * p[1];
      h.vy[i] += e * mik * p[0];
      h.dvx[i] += e * p[2];
      h.dvy[i] += e * mik * p[1];
    }
  }
  if (out.find(0)) {
    Harmonic& h0 = out.at(0, true);
    for (auto* v : {&h0.vx, &h0.vy, &h0.dvx, &h0.dvy})
      for (cplx& z : *v) z = z.real();
  }
  return out;
}

}  // namespace

ChannelField ExtensionField::at(double t) const { return assemble_lift(*this, t, false); }

ChannelField ExtensionField::dt_at(double t) const { return assemble_lift(*this, t, true); }

ExtensionField build_extension(const BoundaryData& beta, double epsilon, const StokesBasis& basis,
                               int n_t) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (n_t < 2) throw Error(ErrorKind::InvalidArgument, "n_t must be >= 2");
  const DomainSpec& dom = basis.domain();
  require_soc(beta, dom.length_x);

  ExtensionField B;
  B.epsilon = epsilon;
  B.tau = beta.tau;
  B.n_t = n_t;
  B.grid = basis.grid_ptr();
  if (beta.zero()) {
    B.delta = 0.25 * dom.wall_gap;
    B.inner_radius = B.delta * std::exp(-1.0);
    return B;
  }
  for (const auto& wall : beta.walls)
    for (const WallHarmonic& h : wall)
      if (h.m_x >= dom.n_x / 2)
        throw Error(ErrorKind::InvalidArgument, "boundary harmonic m_x beyond the x resolution");

  const Layout l = layout_for(layer_sizes(beta, dom.length_x), epsilon, dom.wall_gap);
  if (l.inner < resolution_floor(basis)) {
    throw Error(ErrorKind::EpsilonUnreachable,
                "layer core " + std::to_string(l.inner) + " below grid resolution; smallest reachable epsilon is " +
                    std::to_string(min_reachable_epsilon(beta, basis)));
  }
  B.delta = l.delta;
  B.log_span = l.log_span;
  B.inner_radius = l.inner;

  std::map<std::pair<int, int>, LiftTerm> merged;
  for (int wall = 0; wall < 2; ++wall) {
    for (const WallHarmonic& h : beta.walls[wall]) {
      if (h.amplitude == 0.0) continue;
      if (h.component == WallHarmonic::Normal && h.m_x == 0) continue;  // zero flux already checked
      LiftTerm& t = merged[{h.m_x, h.m_t}];
      t.m = h.m_x;
      t.m_t = h.m_t;
      const cplx a = std::polar(h.amplitude, h.phase);
      if (h.component == WallHarmonic::Tangential) {
        (wall == 0 ? t.u_bottom : t.u_top) += a;
      } else {
        // beta . n with n = -e_y at the bottom and +e_y at the top; the
        // offset g satisfies -i kappa g = v_y.
        const cplx vy = wall == 0 ? -a : a;
        const double k = kappa(dom.length_x, h.m_x);
        (wall == 0 ? t.g_bottom : t.g_top) += cplx(0.0, 1.0) * vy / k;
      }
    }
  }
  for (auto& [key, term] : merged) B.terms.push_back(term);
  return B;
}

double min_reachable_epsilon(const BoundaryData& beta, const StokesBasis& basis) {
  const LayerSizes s = layer_sizes(beta, basis.domain().length_x);
  const double gap = basis.domain().wall_gap;
  const double floor = resolution_floor(basis);
  double hi = 1.0;
  while (layout_for(s, hi, gap).inner < floor && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (layout_for(s, mid, gap).inner < floor) lo = mid;
    else hi = mid;
  }
  return hi;
}

double trace_error(const ExtensionField& B, const BoundaryData& beta) {
  if (!B.grid) return 0.0;
  const Grid& g = *B.grid;
  const auto xs = g.x_points();
  const double w = omega(beta.tau);
  double worst = 0.0;
  std::vector<int> ms;
  for (const auto& wall : beta.walls)
    for (const WallHarmonic& h : wall) ms.push_back(h.m_x);
  for (const LiftTerm& t : B.terms) ms.push_back(t.m);
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  for (int j = 0; j < B.n_t; ++j) {
    const double t = B.sample_time(j);
    for (int wall = 0; wall < 2; ++wall) {
      const double y = wall == 0 ? 0.0 : g.wall_gap;
      std::vector<std::array<cplx, 2>> prof;
      for (int m : ms) prof.push_back(B.profile_at(m, y, t));
      for (double x : xs) {
        double bx = 0.0, by = 0.0;
        for (std::size_t i = 0; i < ms.size(); ++i) {
          const cplx e = std::polar(1.0, g.wavenumber(ms[i]) * x);
          bx += (prof[i][0] * e).real();
          by += (prof[i][1] * e).real();
        }
        double ex = 0.0, ey = 0.0;
        for (const WallHarmonic& h : beta.walls[wall]) {
          const double v = h.amplitude * std::cos(g.wavenumber(h.m_x) * x + w * h.m_t * t + h.phase);
          if (h.component == WallHarmonic::Tangential) ex += v;
          else ey += wall == 0 ? -v : v;
        }
        worst = std::max(worst, std::hypot(bx - ex, by - ey));
      }
    }
  }
  return worst;
}

NormTable extension_norm_table(const ExtensionField& B, const StokesBasis& basis, double gamma) {
  NormTable table;
  const int n = B.n_t;
  for (int j = 0; j < n; ++j) {
    NormSample s;
    if (B.steady() && j > 0) {
      s = table.samples.front();
    } else if (!B.zero()) {
      const double t = B.sample_time(j);
      const ChannelField f = B.at(t);
      s.l2 = std::sqrt(std::max(0.0, inner(f, f)));
      s.l4 = lp_norm(f, 4.0);
      s.grad = std::sqrt(std::max(0.0, grad_inner(f, f)));
      s.div = divergence_l2(f);
      if (!B.steady()) {
        const ChannelField ft = B.dt_at(t);
        s.dt = std::sqrt(std::max(0.0, inner(ft, ft)));
      }
      const Eigen::VectorXd c = basis.project(f);
      s.a = frac_norm(c, basis, 1.0);
      s.a_gamma = frac_norm(c, basis, gamma);
      s.a_3g2 = frac_norm(c, basis, 1.5 * gamma);
      s.a_ghalf = frac_norm(c, basis, gamma + 0.5);
    }
    auto up = [](double& a, double b) { a = std::max(a, b); };
    up(table.sup.l2, s.l2);
    up(table.sup.dt, s.dt);
    up(table.sup.l4, s.l4);
    up(table.sup.grad, s.grad);
    up(table.sup.a, s.a);
    up(table.sup.a_gamma, s.a_gamma);
    up(table.sup.a_3g2, s.a_3g2);
    up(table.sup.a_ghalf, s.a_ghalf);
    up(table.sup.div, s.div);
    table.samples.push_back(s);
  }
  return table;
}

HopfReport hopf_certificate(const ExtensionField& B, const StokesBasis& basis, int n_random,
                            std::uint64_t seed) {
  HopfReport rep;
  rep.epsilon = B.epsilon;
  rep.n_random = n_random;
  if (B.zero()) return rep;
  const std::size_t k = basis.k();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> randoms;
  for (int r = 0; r < n_random; ++r) {
    Eigen::VectorXd c(k);
    for (std::size_t i = 0; i < k; ++i) c(i) = normal(rng);
    randoms.push_back(c / c.norm());
  }
  const Eigen::VectorXd lam = basis.lambdas();
  const Eigen::VectorXd isq = lam.cwiseSqrt().cwiseInverse();
  const int n_times = B.steady() ? 1 : B.n_t;
  for (int j = 0; j < n_times; ++j) {
    const ChannelField b = B.at(B.sample_time(j));
    Eigen::MatrixXd S(k, k);
    for (std::size_t i = 0; i < k; ++i) {
      const ChannelField adv = advect(basis.field(i), b);
      for (std::size_t l = 0; l < k; ++l) S(i, l) = inner(adv, basis.field(l));
    }
    const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    for (std::size_t i = 0; i < k; ++i)
      rep.basis_max = std::max(rep.basis_max, std::abs(sym(i, i)) / lam(i));
    for (const Eigen::VectorXd& c : randoms) {
      const double num = std::abs(c.dot(sym * c));
      const double den = c.dot(lam.cwiseProduct(c));
      rep.random_max = std::max(rep.random_max, num / den);
    }
    const Eigen::MatrixXd W = isq.asDiagonal() * sym * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
    rep.span_sup = std::max(rep.span_sup, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace mhdp
