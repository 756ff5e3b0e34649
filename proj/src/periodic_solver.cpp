#include "mhdp/periodic_solver.hpp"

#include <array>
#include <chrono>
#include <complex>
#include <limits>
#include <numbers>
#include <cmath>
#include <random>
#include <sstream>

#include "mhdp/errors.hpp"
#include "mhdp/parallel.hpp"

namespace mhdp {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::March: return "march";
    case Strategy::NewtonPoincare: return "newton";
    case Strategy::PicardPhi: return "picard";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "march") return Strategy::March;
  if (name == "newton") return Strategy::NewtonPoincare;
  if (name == "picard") return Strategy::PicardPhi;
  throw Error(ErrorKind::InvalidArgument, "unknown strategy " + name);
}

double energy_norm(const Eigen::VectorXd& y, double alpha) {
  const Eigen::Index k = y.size() / 2;
  return std::sqrt(alpha * y.head(k).squaredNorm() + y.tail(k).squaredNorm());
}

Eigen::VectorXd poincare_map(const GalerkinSystem& sys, const Eigen::VectorXd& y0, const IntegratorConfig& cfg) {
  return integrate(sys, y0, 0.0, sys.tau, cfg, false).y.back();
}

PeriodicOrbit orbit_from_start(const GalerkinSystem& sys, const Eigen::VectorXd& y0, const IntegratorConfig& cfg,
                               Strategy strategy) {
  Trajectory tr = integrate(sys, y0, 0.0, sys.tau, cfg, true);
  PeriodicOrbit o;
  o.strategy = strategy;
  o.k = sys.k;
  o.t = std::move(tr.t);
  o.y = std::move(tr.y);
  o.residual = energy_norm(o.y.back() - o.y.front(), sys.params.alpha);
  return o;
}

Eigen::VectorXd frozen_map(const GalerkinSystem& sys, const std::vector<Eigen::VectorXd>& e0,
                           const std::vector<Eigen::VectorXd>& e1, const Eigen::VectorXd& y0,
                           const IntegratorConfig& cfg, std::vector<Eigen::VectorXd>* path) {
  const double dt = sys.tau / cfg.n_steps;
  const Eigen::VectorXd L = stiff_rates(sys);
  Eigen::VectorXd y = y0;
  if (path) {
    path->clear();
    path->push_back(y);
  }
  for (int n = 0; n < cfg.n_steps; ++n) {
    y = corrector(y, e0[n], e1[n], L, dt);
    if (path) path->push_back(y);
  }
  return y;
}

namespace {

using Clock = std::chrono::steady_clock;

[[noreturn]] void not_converged(const char* what, const std::vector<double>& history, const std::string& hint) {
  std::ostringstream msg;
  msg << what << " did not reach tolerance after " << history.size() << " iterations; last gaps:";
  const std::size_t from = history.size() > 5 ? history.size() - 5 : 0;
  for (std::size_t i = from; i < history.size(); ++i) msg << ' ' << history[i];
  if (!hint.empty()) msg << "; " << hint;
  throw Error(ErrorKind::NotConverged, msg.str());
}

Eigen::VectorXd solve_march(const GalerkinSystem& sys, const SolverConfig& cfg, PeriodicOrbit& rec) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(2 * sys.k);
  for (int p = 0; p < cfg.max_periods; ++p) {
    const Eigen::VectorXd next = poincare_map(sys, s, cfg.integrator);
    const double gap = energy_norm(next - s, sys.params.alpha);
    rec.history.push_back(gap);
    s = next;
    rec.iterations = p + 1;
    if (gap < cfg.tol_fp) return s;
  }
  not_converged("march", rec.history,
                "the forcing may violate the smallness condition that guarantees an attracting orbit");
}

Eigen::VectorXd solve_newton(const GalerkinSystem& sys, const SolverConfig& cfg, PeriodicOrbit& rec) {
  const int n = 2 * sys.k;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  for (int it = 0; it < cfg.max_newton; ++it) {
    const Eigen::VectorXd Ps = poincare_map(sys, s, cfg.integrator);
    const Eigen::VectorXd F = Ps - s;
    const double gap = energy_norm(F, sys.params.alpha);
    rec.history.push_back(gap);
    rec.iterations = it + 1;
    if (gap < cfg.tol_fp) return s;
    Eigen::MatrixXd J(n, n);
    parallel_for(n, [&](int i) {
      Eigen::VectorXd sp = s;
      const double h = cfg.fd_step * (1.0 + std::abs(s(i)));
      sp(i) += h;
      J.col(i) = (poincare_map(sys, sp, cfg.integrator) - Ps) / h;
    });
    J -= Eigen::MatrixXd::Identity(n, n);
    const Eigen::VectorXd delta = J.partialPivLu().solve(-F);
    if (!delta.allFinite()) throw Error(ErrorKind::NotConverged, "newton step is not finite");
    s += delta;
  }
  not_converged("newton", rec.history, "");
}

struct FrozenPath {
  std::vector<Eigen::VectorXd> e0, e1;
};

// Explicit evaluations along a path y_n, with the corrector stage taken at
// the predictor built from y_n.  At a fixed point these are exactly the
// evaluations of the nonlinear scheme.
FrozenPath freeze(const GalerkinSystem& sys, const std::vector<Eigen::VectorXd>& path, const IntegratorConfig& cfg) {
  const double dt = sys.tau / cfg.n_steps;
  const Eigen::VectorXd L = stiff_rates(sys);
  FrozenPath f;
  f.e0.resize(cfg.n_steps);
  f.e1.resize(cfg.n_steps);
  for (int n = 0; n < cfg.n_steps; ++n) {
    const double t = n * dt;
    f.e0[n] = explicit_part(sys, t, path[n]);
    f.e1[n] = explicit_part(sys, t + dt, predictor(path[n], f.e0[n], L, dt));
  }
  return f;
}

double superposition_check(const GalerkinSystem& sys, const FrozenPath& fz, const IntegratorConfig& cfg,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int n = 2 * sys.k;
  std::array<Eigen::VectorXd, 3> ys;
  for (auto& y : ys) {
    y.resize(n);
    for (int i = 0; i < n; ++i) y(i) = normal(rng);
  }
  const double a = 0.5, b = 0.8, c = 1.0 - a - b;
  Eigen::VectorXd combo = a * frozen_map(sys, fz.e0, fz.e1, ys[0], cfg) +
                          b * frozen_map(sys, fz.e0, fz.e1, ys[1], cfg) +
                          c * frozen_map(sys, fz.e0, fz.e1, ys[2], cfg);
  const Eigen::VectorXd direct = frozen_map(sys, fz.e0, fz.e1, a * ys[0] + b * ys[1] + c * ys[2], cfg);
  return (combo - direct).norm() / std::max(1.0, direct.norm());
}

Eigen::VectorXd solve_picard(const GalerkinSystem& sys, const SolverConfig& cfg, PeriodicOrbit& rec) {
  const int n = 2 * sys.k;
  const IntegratorConfig& ic = cfg.integrator;
  const double dt = sys.tau / ic.n_steps;
  const Eigen::ArrayXd half = 0.5 * dt * stiff_rates(sys).array();
  // Linear part of the one-period map, per component.
  const Eigen::ArrayXd mult = ((1.0 + half) / (1.0 - half)).pow(ic.n_steps);
  std::vector<Eigen::VectorXd> path(ic.n_steps + 1, Eigen::VectorXd::Zero(n));
  for (int it = 0; it < cfg.max_picard; ++it) {
    const FrozenPath fz = freeze(sys, path, ic);
    if (it == 0) rec.superposition_error = superposition_check(sys, fz, ic, cfg.seed);
    const Eigen::VectorXd b = frozen_map(sys, fz.e0, fz.e1, Eigen::VectorXd::Zero(n), ic);
    const Eigen::VectorXd y0 = (b.array() / (1.0 - mult)).matrix();
    std::vector<Eigen::VectorXd> next;
    frozen_map(sys, fz.e0, fz.e1, y0, ic, &next);
    double gap = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      gap = std::max(gap, energy_norm(next[i] - path[i], sys.params.alpha));
    rec.history.push_back(gap);
    rec.iterations = it + 1;
    path = std::move(next);
    if (!path.front().allFinite()) throw Error(ErrorKind::NonFiniteState, "picard iterate diverged");
    if (gap < cfg.tol_fp) return path.front();
  }
  not_converged("picard", rec.history, "");
}

}  // namespace

PeriodicOrbit solve_periodic(const GalerkinSystem& sys, const SolverConfig& cfg) {
  if (!(cfg.tol_fp > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol_fp must be positive");
  const auto start = Clock::now();
  PeriodicOrbit rec;
  Eigen::VectorXd s;
  switch (cfg.strategy) {
    case Strategy::March: s = solve_march(sys, cfg, rec); break;
    case Strategy::NewtonPoincare: s = solve_newton(sys, cfg, rec); break;
    case Strategy::PicardPhi: s = solve_picard(sys, cfg, rec); break;
  }
  PeriodicOrbit o = orbit_from_start(sys, s, cfg.integrator, cfg.strategy);
  o.history = std::move(rec.history);
  o.iterations = rec.iterations;
  o.superposition_error = rec.superposition_error;
  o.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return o;
}

Eigen::VectorXd linear_response(const GalerkinSystem& sys, double t) {
  const int k = sys.k, n = sys.n_t;
  const Eigen::MatrixXd& F = sys.vec_terms.at("F");
  const double w0 = 2.0 * std::numbers::pi / sys.tau;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * k);
  for (int j = 0; j < k; ++j) {
    const double a = sys.params.nu * sys.lambda(j) / sys.params.alpha;
    for (int m = 0; m <= n / 2; ++m) {
      std::complex<double> fm = 0.0;
      for (int s = 0; s < n; ++s) fm += F(j, s) * std::polar(1.0, -2.0 * std::numbers::pi * m * s / n);
      fm /= n;
      const double weight = (m == 0 || 2 * m == n) ? 1.0 : 2.0;
      const std::complex<double> cm = fm / std::complex<double>(a, m * w0);
      y(j) += weight * (cm * std::polar(1.0, m * w0 * t)).real();
    }
  }
  return y;
}

DecayReport contraction_probe(const GalerkinSystem& sys, const PeriodicOrbit& orbit, double perturbation_size,
                              int n_periods, const IntegratorConfig& cfg, std::uint64_t seed) {
  if (n_periods < 2) throw Error(ErrorKind::InvalidArgument, "contraction probe needs >= 2 periods");
  DecayReport rep;
  const double alpha = sys.params.alpha;
  const int n = 2 * sys.k;
  rep.q_structure = sys.lambda.minCoeff() * std::min(sys.params.nu, sys.params.chi) * (1.0 / alpha + 1.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd dir(n);
  for (int i = 0; i < n; ++i) dir(i) = normal(rng);
  dir /= energy_norm(dir, alpha);
  // The separation is rescaled to perturbation_size after every period so
  // that fast decay does not run into roundoff; distance2 accumulates the
  // unscaled history.
  Eigen::VectorXd a = orbit.y.front();
  Eigen::VectorXd b = a + perturbation_size * dir;
  const double d0 = std::pow(perturbation_size, 2);
  double log_d2 = std::log(d0);
  std::vector<double> logs{log_d2};
  rep.distance2.push_back(d0);
  rep.monotone = true;
  for (int p = 0; p < n_periods; ++p) {
    a = poincare_map(sys, a, cfg);
    b = poincare_map(sys, b, cfg);
    const double d = energy_norm(b - a, alpha);
    const double r = d * d / d0;
    rep.ratios.push_back(r);
    if (!(r < 1.0) || !(d > 0.0)) rep.monotone = false;
    if (d <= 1e3 * std::numeric_limits<double>::epsilon() * energy_norm(a, alpha)) rep.roundoff_limited = true;
    if (d > 0.0) b = a + (perturbation_size / d) * (b - a);
    log_d2 += std::log(r);
    logs.push_back(log_d2);
    rep.distance2.push_back(std::exp(log_d2));
  }
  // Least squares slope of log distance2 against t over periods 1..n.
  double st = 0, sl = 0, stt = 0, stl = 0;
  int m = 0;
  for (std::size_t p = 1; p < logs.size(); ++p) {
    if (!std::isfinite(logs[p])) continue;
    const double t = p * sys.tau, l = logs[p];
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    ++m;
  }
  if (m >= 2) {
    const double slope = (m * stl - st * sl) / (m * stt - st * st);
    rep.q_emp = -slope;
  }
  rep.l_emp = rep.q_structure > 0.0 ? rep.q_emp / rep.q_structure : 0.0;
  return rep;
}

}  // namespace mhdp
