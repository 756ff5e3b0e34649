#include "mhdp/integrator.hpp"

#include <cmath>
#include <sstream>

#include "mhdp/errors.hpp"

namespace mhdp {

Eigen::VectorXd explicit_part(const GalerkinSystem& sys, double t, const Eigen::VectorXd& y) {
  const int k = sys.k;
  const Rhs r = rhs_linearized(sys, t, y.head(k), y.tail(k));
  Eigen::VectorXd e(2 * k);
  e << r.u / sys.params.alpha, r.h;
  return e;
}

Eigen::VectorXd stiff_rates(const GalerkinSystem& sys) {
  Eigen::VectorXd L(2 * sys.k);
  L << -sys.params.nu / sys.params.alpha * sys.lambda, -sys.params.chi * sys.lambda;
  return L;
}

Eigen::VectorXd predictor(const Eigen::VectorXd& y, const Eigen::VectorXd& e0, const Eigen::VectorXd& L, double dt) {
  const Eigen::ArrayXd half = 0.5 * dt * L.array();
  return ((y.array() * (1.0 + half) + dt * e0.array()) / (1.0 - half)).matrix();
}

Eigen::VectorXd corrector(const Eigen::VectorXd& y, const Eigen::VectorXd& e0, const Eigen::VectorXd& e1,
                          const Eigen::VectorXd& L, double dt) {
  const Eigen::ArrayXd half = 0.5 * dt * L.array();
  return ((y.array() * (1.0 + half) + 0.5 * dt * (e0.array() + e1.array())) / (1.0 - half)).matrix();
}

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Advances y over [t, t + dt], splitting on rejection.
Eigen::VectorXd advance(const GalerkinSystem& sys, const Eigen::VectorXd& L, double t, const Eigen::VectorXd& y,
                        double dt, const IntegratorConfig& cfg, int depth) {
  const Eigen::VectorXd e0 = explicit_part(sys, t, y);
  const Eigen::VectorXd ys = predictor(y, e0, L, dt);
  Eigen::VectorXd y1;
  if (finite(ys)) y1 = corrector(y, e0, explicit_part(sys, t + dt, ys), L, dt);
  const bool ok = finite(ys) && finite(y1) && y1.norm() <= cfg.growth_limit * (1.0 + y.norm());
  if (ok) return y1;
  if (depth >= cfg.max_rejections) {
    std::ostringstream msg;
    msg << "at t=" << t;
    if (!finite(ys) || !finite(y1)) throw Error(ErrorKind::NonFiniteState, msg.str());
    throw Error(ErrorKind::StepRejectionLimit, msg.str());
  }
  const Eigen::VectorXd mid = advance(sys, L, t, y, 0.5 * dt, cfg, depth + 1);
  return advance(sys, L, t + 0.5 * dt, mid, 0.5 * dt, cfg, depth + 1);
}

}  // namespace

Trajectory integrate(const GalerkinSystem& sys, const Eigen::VectorXd& y0, double t0, double t1,
                     const IntegratorConfig& cfg, bool keep_all) {
  if (y0.size() != 2 * sys.k) throw Error(ErrorKind::InvalidArgument, "state length must be 2k");
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidArgument, "integrate needs t1 > t0");
  if (cfg.n_steps < 1) throw Error(ErrorKind::InvalidArgument, "n_steps must be positive");
  if (!finite(y0)) throw Error(ErrorKind::NonFiniteState, "initial state at t=" + std::to_string(t0));
  const double dt = sys.tau / cfg.n_steps;
  const double steps_real = (t1 - t0) / dt;
  const long steps = std::lround(steps_real);
  if (std::abs(steps_real - steps) > 1e-9 * std::max(1.0, steps_real))
    throw Error(ErrorKind::InvalidArgument, "interval is not a whole number of steps");
  const Eigen::VectorXd L = stiff_rates(sys);
  Trajectory tr;
  Eigen::VectorXd y = y0;
  if (keep_all) {
    tr.t.reserve(steps + 1);
    tr.y.reserve(steps + 1);
    tr.t.push_back(t0);
    tr.y.push_back(y);
  }
  for (long n = 0; n < steps; ++n) {
    const double t = t0 + n * dt;
    y = advance(sys, L, t, y, dt, cfg, 0);
    if (keep_all) {
      tr.t.push_back(t0 + (n + 1) * dt);
      tr.y.push_back(y);
    }
  }
  if (!keep_all) {
    tr.t = {t0, t1};
    tr.y = {y0, y};
  }
  return tr;
}

}  // namespace mhdp
