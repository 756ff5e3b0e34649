#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mhdp/boundary_extension.hpp"
#include "mhdp/galerkin.hpp"
#include "mhdp/harmonic_file.hpp"

using namespace mhdp;
using std::numbers::pi;

namespace {

struct Fixture {
  StokesBasis basis;
  ExtensionField B1, B2;
  ForcingSpec f;
  GalerkinSystem sys;
};

const Fixture& fixture() {
  static const Fixture fx = [] {
    DomainSpec d;
    d.n_x = 8;
    d.n_y = 32;
    StokesBasis b = build_basis(d, 14);
    const HarmonicFile wall = parse_harmonic_text(
        "tau = 1.0\n[wall bottom]\ntangential 1 1 0.2 0.0\ntangential 0 0 0.1 0.0\n[wall top]\ntangential 2 0 0.1 0.3\n");
    const HarmonicFile mag = parse_harmonic_text("tau = 1.0\n[wall top]\ntangential 1 1 0.15 0.0\n");
    ForcingSpec f;
    f.tau = 1.0;
    f.terms = {{0, 0, 1, 1.0, 0.0, 1}, {1, 1, 0, 0.5, 0.2, 1}};
    ExtensionField B1 = build_extension(wall.boundary, 0.2, b, 16);
    ExtensionField B2 = build_extension(mag.boundary, 0.2, b, 16);
    GalerkinSystem sys = assemble(b, B1, B2, f, {1.3, 0.7, 0.9}, {true, 16});
    return Fixture{std::move(b), std::move(B1), std::move(B2), std::move(f), std::move(sys)};
  }();
  return fx;
}

Eigen::VectorXd random_vec(int n, unsigned seed) {
  std::mt19937 g(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(g);
  return v;
}

}  // namespace

TEST_CASE("trilinear form is skew in its last two slots") {
  const GalerkinSystem& s = fixture().sys;
  double worst = 0, scale = 0;
  for (int i = 0; i < s.k; ++i)
    for (int j = 0; j < s.k; ++j)
      for (int l = 0; l < s.k; ++l) {
        worst = std::max(worst, std::abs(s.tensor(i, j, l) + s.tensor(i, l, j)));
        scale = std::max(scale, std::abs(s.tensor(i, j, l)));
      }
  CHECK(scale > 0.0);
  CHECK(worst < 1e-10 * scale);
}

TEST_CASE("tensor entries match pointwise products on the grid") {
  const Fixture& fx = fixture();
  for (int i : {0, 3, 7})
    for (int j : {1, 5, 12}) {
      const Eigen::VectorXd p = convect_on_grid(fx.basis.field(i), fx.basis.field(j), fx.basis);
      for (int l = 0; l < fx.sys.k; ++l) CHECK(std::abs(p(l) - fx.sys.tensor(i, j, l)) < 1e-9);
    }
}

TEST_CASE("quadratic term does no work") {
  const GalerkinSystem& s = fixture().sys;
  for (unsigned seed : {1u, 2u, 3u}) {
    const Eigen::VectorXd a = random_vec(s.k, seed), b = random_vec(s.k, seed + 10);
    CHECK(std::abs(b.dot(quadratic(s, a, b))) < 1e-10 * a.norm() * b.squaredNorm());
  }
}

TEST_CASE("projected forcing matches the closed form") {
  const Fixture& fx = fixture();
  // x-forcing sin(pi y) cos(2 pi t) is a multiple of the lowest mode:
  // (f, w_1) = sqrt(length_x / 2) cos(2 pi t) up to the mode's sign.
  ForcingSpec f;
  f.tau = 1.0;
  f.terms = {{0, 0, 1, 1.0, 0.0, 1}};
  const GalerkinSystem s = assemble(fx.basis, {}, {}, f, {}, {false, 8});
  const double Lx = fx.basis.domain().length_x;
  for (int j = 0; j < 8; ++j) {
    const double t = j / 8.0;
    const Eigen::VectorXd F = s.vec_terms.at("F").col(j);
    CHECK(std::abs(F(0)) == doctest::Approx(std::sqrt(Lx / 2) * std::abs(std::cos(2 * pi * t))).epsilon(1e-10));
    CHECK(F.tail(s.k - 1).cwiseAbs().maxCoeff() < 1e-12);
  }
  const ForcingNorms n = forcing_norms(f, fx.basis.grid_ptr(), 8);
  CHECK(n.M0 == doctest::Approx(std::sqrt(Lx / 2 * 0.5)).epsilon(1e-10));
  CHECK(n.M == doctest::Approx(Lx * 2 / pi).epsilon(1e-3));
  CHECK(n.M1 == doctest::Approx(2 * pi * std::sqrt(Lx / 2 * 0.5)).epsilon(1e-10));
}

TEST_CASE("linearized right-hand side at the state reproduces the full one") {
  const GalerkinSystem& s = fixture().sys;
  const Eigen::VectorXd c = 0.3 * random_vec(s.k, 4), d = 0.2 * random_vec(s.k, 5);
  for (double t : {0.0, 0.37, 0.81}) {
    const Rhs full = rhs_nonlinear(s, t, c, d);
    const Rhs lin = rhs_linearized(s, t, c, d);
    const Eigen::ArrayXd nl = s.params.nu * s.lambda.array(), cl = s.params.chi * s.lambda.array();
    CHECK((lin.u.array() - nl * c.array() - full.u.array()).abs().maxCoeff() < 1e-12 * (1 + full.u.norm()));
    CHECK((lin.h.array() - cl * d.array() - full.h.array()).abs().maxCoeff() < 1e-12 * (1 + full.h.norm()));
  }
}

TEST_CASE("jacobian matches finite differences") {
  const GalerkinSystem& s = fixture().sys;
  const Eigen::VectorXd c = 0.3 * random_vec(s.k, 7), d = 0.2 * random_vec(s.k, 8);
  const double t = 0.23, e = 1e-6;
  const Eigen::MatrixXd J = jacobian(s, t, c, d);
  for (int col : {0, 5, s.k + 2, 2 * s.k - 1}) {
    Eigen::VectorXd cp = c, cm = c, dp = d, dm = d;
    if (col < s.k) {
      cp(col) += e;
      cm(col) -= e;
    } else {
      dp(col - s.k) += e;
      dm(col - s.k) -= e;
    }
    const Rhs p = rhs_nonlinear(s, t, cp, dp), m = rhs_nonlinear(s, t, cm, dm);
    Eigen::VectorXd fd(2 * s.k);
    fd << (p.u - m.u) / (2 * e), (p.h - m.h) / (2 * e);
    CHECK((J.col(col) - fd).cwiseAbs().maxCoeff() < 1e-6 * (1 + fd.norm()));
  }
}

TEST_CASE("grid products agree with the tensor path") {
  const Fixture& fx = fixture();
  const Eigen::VectorXd c = 0.3 * random_vec(fx.sys.k, 9), d = 0.2 * random_vec(fx.sys.k, 10);
  const Rhs a = rhs_nonlinear(fx.sys, 0.6, c, d), b = rhs_nonlinear_grid(fx.sys, fx.basis, 0.6, c, d);
  CHECK((a.u - b.u).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((a.h - b.h).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("advection by a tangential lift is skew") {
  const GalerkinSystem& s = fixture().sys;
  // The cutoff is only C^2 at the layer edges, which are not panel breaks,
  // so this holds to quadrature accuracy rather than roundoff.
  for (const char* name : {"N2B1", "N2B2"})
    for (const Eigen::MatrixXd& N : s.mat_terms.at(name))
      CHECK((N + N.transpose()).cwiseAbs().maxCoeff() < 1e-5 * N.cwiseAbs().maxCoeff());
}

TEST_CASE("assembly bookkeeping") {
  const Fixture& fx = fixture();
  const GalerkinSystem& s = fx.sys;
  CHECK(s.k == 14);
  CHECK(s.n_t == 16);
  for (int j = 0; j < s.k; ++j) CHECK(s.lambda(j) == fx.basis.lambda(j));
  for (const char* name : {"B1t", "AB1", "B1B1", "B2B2", "B2B1", "B1B2", "B2t", "AB2", "F"}) {
    REQUIRE(s.vec_terms.count(name) == 1);
    CHECK(s.vec_terms.at(name).rows() == s.k);
    CHECK(s.vec_terms.at(name).cols() == s.n_t);
  }
  // Without lifts or forcing every coupling vanishes.
  const GalerkinSystem z = assemble(fx.basis, {}, {}, {}, {}, {true, 8});
  const Rhs r = rhs_nonlinear(z, 0.1, Eigen::VectorXd::Zero(z.k), Eigen::VectorXd::Zero(z.k));
  CHECK(r.u.norm() == 0.0);
  CHECK(r.h.norm() == 0.0);
}

TEST_CASE("linear assembly drops the tensor") {
  const Fixture& fx = fixture();
  const GalerkinSystem s = assemble(fx.basis, {}, {}, fx.f, {}, {false, 8});
  const Eigen::VectorXd c = random_vec(s.k, 12);
  CHECK(quadratic(s, c, c).norm() == 0.0);
}
