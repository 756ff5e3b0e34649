#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mhdp/boundary_extension.hpp"
#include "mhdp/errors.hpp"
#include "mhdp/estimates.hpp"
#include "mhdp/harmonic_file.hpp"

using namespace mhdp;
using std::numbers::pi;

namespace {

struct Case {
  StokesBasis basis;
  ExtensionField B1, B2;
  ForcingSpec f;
  GalerkinSystem sys;
  PeriodicOrbit orbit;
  VerifyInputs in() const { return {&sys, &basis, &B1, &B2, &f, 0.0}; }
};

std::unique_ptr<Case> make_case(double amp, bool lifts, bool nonlinear, int n_steps = 512) {
  DomainSpec d;
  d.n_x = 8;
  d.n_y = 32;
  auto c = std::make_unique<Case>(Case{build_basis(d, 12), {}, {}, {}, {}, {}});
  c->f.tau = 1.0;
  c->f.terms = {{0, 0, 1, amp, 0.0, 1}, {0, 1, 1, 0.5 * amp, 0.3, 2}};
  if (lifts) {
    const HarmonicFile w = parse_harmonic_text("tau = 1.0\n[wall bottom]\ntangential 1 1 0.01 0.0\n");
    c->B1 = build_extension(w.boundary, 0.1, c->basis, 16);
    c->B2 = build_extension(w.boundary, 0.1, c->basis, 16);
  }
  c->sys = assemble(c->basis, c->B1, c->B2, c->f, {}, {nonlinear, 16});
  SolverConfig sc;
  sc.strategy = Strategy::NewtonPoincare;
  sc.tol_fp = 1e-11;
  sc.integrator.n_steps = n_steps;
  c->orbit = solve_periodic(c->sys, sc);
  return c;
}

const Case& small_case() {
  static const auto c = make_case(0.02, true, true);
  return *c;
}

}  // namespace

TEST_CASE("check records") {
  const CheckRecord ok = make_check("contraction", 0.5, 1.0);
  CHECK(ok.pass);
  CHECK(ok.margin == 0.5);
  CHECK(ok.anchor == anchor_for("contraction"));
  CHECK_FALSE(make_check("contraction", 2.0, 1.0).pass);
  const CheckRecord bad = make_check("contraction", std::numeric_limits<double>::quiet_NaN(), 1.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.margin == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(anchor_for("no-such-check"), Error);
  std::set<std::string> names;
  for (const auto& [n, a] : anchor_table()) {
    CHECK(names.insert(n).second);
    CHECK_FALSE(a.empty());
  }
}

TEST_CASE("report csv and constants") {
  EstimateReport r;
  r.add(make_check("energy-inequality", 1.0, 2.0, "x"));
  r.add(make_check("contraction", 3.0, 1.0));
  r.set_constant("M", 0.25);
  r.set_constant("M", 0.5);
  CHECK(r.constant("M") == 0.5);
  CHECK(std::isnan(r.constant("E")));
  CHECK(r.constants.size() == 1);
  CHECK_FALSE(r.all_pass());
  REQUIRE(r.find("contraction") != nullptr);
  CHECK(r.find("gradient-sup") == nullptr);
  std::ostringstream os;
  r.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "name,anchor,lhs,rhs,margin,pass");
  std::getline(is, line);
  CHECK(line.rfind("energy-inequality,\"", 0) == 0);
  CHECK(line.substr(line.size() - 5) == ",true");
  std::getline(is, line);
  CHECK(line.substr(line.size() - 6) == ",false");
  CHECK(r.summary().find("1/2 checks pass") != std::string::npos);
}

TEST_CASE("spectral time derivative of trigonometric samples") {
  const double tau = 2.0, w = 2 * pi / tau;
  const int n = 32;
  Eigen::MatrixXd s(1, n);
  for (int j = 0; j < n; ++j) s(0, j) = std::sin(w * tau * j / n) + 0.3 * std::cos(3 * w * tau * j / n);
  const Eigen::MatrixXd d1 = spectral_time_derivative(s, tau, 1), d2 = spectral_time_derivative(s, tau, 2);
  for (int j = 0; j < n; ++j) {
    const double t = tau * j / n;
    CHECK(d1(0, j) == doctest::Approx(w * std::cos(w * t) - 0.9 * w * std::sin(3 * w * t)));
    CHECK(d2(0, j) == doctest::Approx(-w * w * std::sin(w * t) - 2.7 * w * w * std::cos(3 * w * t)));
  }
}

TEST_CASE("energy identity holds without lifts") {
  // The balance holds to the integrator's O(dt^2) accuracy.
  const auto c = make_case(0.5, false, true, 4096);
  const EnergyCheck e = energy_inequality_check(c->orbit, c->in());
  CHECK(e.has_identity);
  CHECK_MESSAGE(e.identity.pass, e.identity.lhs, " vs ", e.identity.rhs);
  CHECK(e.inequality.pass);
  CHECK(std::isfinite(e.C));
  CHECK(e.lhs.size() + 1 == c->orbit.y.size());
}

TEST_CASE("mean value time sits at or below the mean") {
  const Case& c = small_case();
  const MeanValue mv = mean_value_time(c.orbit, c.sys);
  CHECK(mv.value <= mv.mean * (1 + 1e-12));
  CHECK(mv.t_star >= 0.0);
  CHECK(mv.t_star < c.sys.tau);
  CHECK(mv.check.pass);
}

TEST_CASE("giga-miyakawa parameter constraints") {
  const StokesBasis& b = small_case().basis;
  CHECK_THROWS_AS(giga_miyakawa_probe(b, 0.0, 0.0, 0.5, 4, 1), Error);   // delta+theta+rho < 1
  CHECK_THROWS_AS(giga_miyakawa_probe(b, 0.0, 0.6, 0.4, 4, 1), Error);   // rho+delta <= 1/2
  CHECK_THROWS_AS(giga_miyakawa_probe(b, 0.0, -0.1, 1.2, 4, 1), Error);  // theta < 0
  const GigaMiyakawa g = giga_miyakawa_probe(b, 0.0, 0.0, 1.0, 20, 9);
  CHECK(g.trials == 20);
  CHECK(std::isfinite(g.c1));
  CHECK(g.c1 > 0.0);
  CHECK(giga_miyakawa_probe(b, 0.0, 0.0, 1.0, 20, 9).c1 == g.c1);
}

TEST_CASE("uniqueness gap") {
  const Case& c = small_case();
  CHECK(uniqueness_gap_check(c.orbit, c.orbit, 1.0).pass);
  PeriodicOrbit other = c.orbit;
  for (auto& y : other.y) y(0) += 1e-3;
  CHECK_FALSE(uniqueness_gap_check(c.orbit, other, 1.0).pass);
}

TEST_CASE("contraction check") {
  DecayReport d;
  d.ratios = {0.5, 0.4, 0.6};
  d.monotone = true;
  d.q_emp = 1.0;
  CHECK(contraction_check(d).pass);
  d.ratios.push_back(1.0);
  d.monotone = false;
  CHECK_FALSE(contraction_check(d).pass);
  CHECK_FALSE(contraction_check(DecayReport{}).pass);
}

TEST_CASE("higher order quantities are finite and self-consistent") {
  const Case& c = small_case();
  const HigherOrder h = higher_order_report(c.orbit, c.sys);
  CHECK(h.check.pass);
  CHECK(h.gradient.pass);
  for (double v : h.values()) CHECK(std::isfinite(v));
  CHECK(higher_order_drift(h, h) == 0.0);
}

TEST_CASE("zero orbit passes every check") {
  DomainSpec d;
  d.n_x = 8;
  d.n_y = 24;
  const StokesBasis b = build_basis(d, 8);
  const GalerkinSystem s = assemble(b, {}, {}, {}, {}, {true, 8});
  SolverConfig sc;
  sc.integrator.n_steps = 64;
  const PeriodicOrbit o = solve_periodic(s, sc);
  const ExtensionField none;
  const ForcingSpec f;
  VerifyOptions vo;
  vo.probe_trials = 5;
  const EstimateReport r = verify_orbit(o, {&s, &b, &none, &none, &f, 0.0}, vo);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
}

TEST_CASE("small-data orbit: certificate and fitted constants") {
  const Case& c = small_case();
  VerifyOptions vo;
  vo.probe_trials = 20;
  vo.seed = 4;
  const EstimateReport r = verify_orbit(c.orbit, c.in(), vo);
  for (const auto& chk : r.checks) {
    CHECK_MESSAGE(chk.pass, chk.name);
    CHECK(chk.anchor == anchor_for(chk.name));
  }
  for (const char* n : {"giga-miyakawa", "energy-inequality", "mean-value-time", "poincare-u", "poincare-h",
                        "lift-groupings", "smallness", "uniform-bound", "gradient-sup", "higher-order"})
    CHECK_MESSAGE(r.find(n) != nullptr, n);
  // Lifts present: no identity record.
  CHECK(r.find("energy-identity") == nullptr);
  const double M = r.constant("M"), d0 = r.constant("d0");
  CHECK(M > 0.0);
  CHECK(r.constant("E") == doctest::Approx(d0 / c.sys.params.chi + d0 / c.sys.params.nu));
  CHECK(M >= r.constant("M_f"));
  for (const char* n : {"d2", "d3", "d4", "d5", "d6"}) CHECK(r.constant(n) <= M);
}

TEST_CASE("uniform bound follows from the fitted constants") {
  const Case& c = small_case();
  const EstimateConstants K = fit_constants(c.orbit, c.in(), -1.0);
  const UniformBoundResult res = lemma7_certificate(c.orbit, c.sys.lambda, K);
  REQUIRE(res.smallness.pass);
  // gamma = 0: sup(|u|^2 + |h|^2) <= E M / mu, recomputed from the samples.
  double sup = 0;
  for (const auto& y : c.orbit.y) sup = std::max(sup, y.squaredNorm());
  CHECK(res.sup_lhs == doctest::Approx(sup));
  CHECK(sup <= K.E * K.M / K.mu);
  CHECK(res.bound.pass);
}
