#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "mhdp/errors.hpp"
#include "mhdp/integrator.hpp"
#include "mhdp/periodic_solver.hpp"

using namespace mhdp;
using std::numbers::pi;

namespace {

const StokesBasis& basis() {
  static const StokesBasis b = [] {
    DomainSpec d;
    d.n_x = 8;
    d.n_y = 24;
    return build_basis(d, 10);
  }();
  return b;
}

// x-forcing A sin(pi y) cos(2 pi t / tau) excites only the lowest mode.
GalerkinSystem single_mode(double tau, double amp, ModelParams p, bool nonlinear = false) {
  ForcingSpec f;
  f.tau = tau;
  f.terms = {{0, 0, 1, amp, 0.0, 1}};
  return assemble(basis(), {}, {}, f, p, {nonlinear, 16});
}

// alpha c' + nu lambda c = alpha F cos(w t): c = Re(F e^{iwt} / (a + iw)), a = nu lambda / alpha.
double closed_form(const GalerkinSystem& s, double t) {
  const double F = s.vec_terms.at("F")(0, 0);
  const double a = s.params.nu * s.lambda(0) / s.params.alpha, w = 2 * pi / s.tau;
  return (F * std::exp(std::complex<double>(0, w * t)) / std::complex<double>(a, w)).real();
}

SolverConfig solver(Strategy st, int n_steps) {
  SolverConfig c;
  c.strategy = st;
  c.tol_fp = 1e-11;
  c.integrator.n_steps = n_steps;
  return c;
}

}  // namespace

TEST_CASE("unforced linear step is the Crank-Nicolson factor") {
  const GalerkinSystem s = assemble(basis(), {}, {}, {}, {1.0, 1.5, 0.5}, {false, 8});
  Eigen::VectorXd y0 = Eigen::VectorXd::Ones(2 * s.k);
  IntegratorConfig ic;
  ic.n_steps = 10;
  const Trajectory tr = integrate(s, y0, 0.0, s.tau, ic);
  REQUIRE(tr.y.size() == 11);
  const double dt = s.tau / 10;
  const Eigen::VectorXd L = stiff_rates(s);
  for (int i = 0; i < 2 * s.k; ++i) {
    const double g = (1 + 0.5 * dt * L(i)) / (1 - 0.5 * dt * L(i));
    CHECK(tr.y.back()(i) == doctest::Approx(std::pow(g, 10)).epsilon(1e-12));
  }
  CHECK(L(0) == doctest::Approx(-1.5 * s.lambda(0)));
  CHECK(L(s.k) == doctest::Approx(-0.5 * s.lambda(0)));
}

TEST_CASE("forced integration converges at second order") {
  const GalerkinSystem s = single_mode(2.0, 1.0, {1.0, 1.0, 1.0});
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(2 * s.k);
  y0(0) = closed_form(s, 0.0);
  double prev = 0;
  for (int n : {64, 128, 256}) {
    IntegratorConfig ic;
    ic.n_steps = n;
    const Trajectory tr = integrate(s, y0, 0.0, s.tau, ic, false);
    const double err = std::abs(tr.y.back()(0) - closed_form(s, s.tau));
    if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("non-finite states are reported") {
  const GalerkinSystem s = single_mode(1.0, 1.0, {});
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(2 * s.k);
  y0(3) = std::numeric_limits<double>::quiet_NaN();
  IntegratorConfig ic;
  ic.n_steps = 8;
  try {
    integrate(s, y0, 0.0, 1.0, ic);
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonFiniteState);
  }
}

TEST_CASE("every strategy finds the closed-form linear orbit") {
  const GalerkinSystem s = single_mode(4.0, 0.7, {1.0, 1.0, 1.0});
  for (Strategy st : {Strategy::March, Strategy::NewtonPoincare, Strategy::PicardPhi}) {
    const PeriodicOrbit o = solve_periodic(s, solver(st, 2048));
    CHECK(o.strategy == st);
    CHECK(o.residual <= 1e-9);
    double err = 0, scale = 0;
    for (std::size_t n = 0; n < o.y.size(); n += 16) {
      err = std::max(err, std::abs(o.y[n](0) - closed_form(s, o.t[n])));
      scale = std::max(scale, std::abs(closed_form(s, o.t[n])));
      CHECK(o.y[n].tail(2 * s.k - 1).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(err < 1e-6 * scale);
  }
}

TEST_CASE("trigonometric linear response matches the hand oracle") {
  const GalerkinSystem s = single_mode(3.0, 1.3, {2.0, 0.5, 1.0});
  for (double t : {0.0, 0.4, 2.2}) CHECK(linear_response(s, t)(0) == doctest::Approx(closed_form(s, t)).epsilon(1e-12));
}

TEST_CASE("strategies agree on a small nonlinear orbit") {
  ForcingSpec f;
  f.tau = 1.0;
  f.terms = {{0, 0, 1, 0.5, 0.0, 1}, {1, 1, 1, 0.5, 0.3, 1}, {0, 1, 0, 0.3, 0.0, 2}};
  const GalerkinSystem s = assemble(basis(), {}, {}, f, {}, {true, 16});
  const PeriodicOrbit a = solve_periodic(s, solver(Strategy::March, 256));
  const PeriodicOrbit b = solve_periodic(s, solver(Strategy::NewtonPoincare, 256));
  const PeriodicOrbit c = solve_periodic(s, solver(Strategy::PicardPhi, 256));
  double gab = 0, gac = 0, scale = 0;
  for (std::size_t n = 0; n < a.y.size(); ++n) {
    gab = std::max(gab, energy_norm(a.y[n] - b.y[n], 1.0));
    gac = std::max(gac, energy_norm(a.y[n] - c.y[n], 1.0));
    scale = std::max(scale, energy_norm(a.y[n], 1.0));
  }
  CHECK(scale > 1e-3);
  CHECK(gab < 1e-8 * scale);
  CHECK(gac < 1e-8 * scale);
  CHECK(c.superposition_error >= 0.0);
  CHECK(c.superposition_error < 1e-10);
}

TEST_CASE("orbit is a fixed point of the period map") {
  const GalerkinSystem s = single_mode(1.0, 1.0, {}, true);
  const SolverConfig cfg = solver(Strategy::NewtonPoincare, 128);
  const PeriodicOrbit o = solve_periodic(s, cfg);
  const Eigen::VectorXd back = poincare_map(s, o.y.front(), cfg.integrator);
  CHECK(energy_norm(back - o.y.front(), 1.0) <= 1e-9);
  CHECK(o.t.size() == 129);
  CHECK(o.t.back() == doctest::Approx(1.0));
}

TEST_CASE("march reports non-convergence with its history") {
  const GalerkinSystem s = single_mode(0.05, 1.0, {});
  SolverConfig cfg = solver(Strategy::March, 32);
  cfg.max_periods = 2;
  try {
    solve_periodic(s, cfg);
    FAIL("expected NotConverged");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotConverged);
  }
}

TEST_CASE("linear decay rate equals twice the slowest modal rate") {
  const ModelParams p{2.0, 1.0, 0.8};
  const GalerkinSystem s = single_mode(0.25, 0.5, p);
  const SolverConfig cfg = solver(Strategy::PicardPhi, 256);
  const PeriodicOrbit o = solve_periodic(s, cfg);
  const DecayReport d = contraction_probe(s, o, 1e-3, 12, cfg.integrator, 3);
  const double oracle = 2 * std::min(p.nu / p.alpha, p.chi) * s.lambda(0);
  CHECK(d.monotone);
  CHECK(d.ratios.size() == 12);
  CHECK(d.q_emp == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("energy norm weights the velocity block") {
  Eigen::VectorXd y(4);
  y << 1, 2, 3, 4;
  CHECK(energy_norm(y, 2.0) == doctest::Approx(std::sqrt(2 * 5.0 + 25.0)));
}

TEST_CASE("strategy names round trip") {
  for (Strategy st : {Strategy::March, Strategy::NewtonPoincare, Strategy::PicardPhi})
    CHECK(parse_strategy(to_string(st)) == st);
  CHECK_THROWS_AS(parse_strategy("shooting"), Error);
}
