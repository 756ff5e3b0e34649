#include "mhdp/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unsupported/Eigen/FFT>

#include "mhdp/errors.hpp"
#include "mhdp/parallel.hpp"

namespace mhdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest C with |lhs| <= C rhs over everything added so far.
struct Fit {
  double c = 0.0;
  void add(double lhs, double rhs) {
    lhs = std::abs(lhs);
    if (rhs > 0.0)
      c = std::max(c, lhs / rhs);
    else if (lhs > 1e-14)
      c = kInf;
  }
};

double snorm(const Eigen::VectorXd& b, const Eigen::VectorXd& lambda, double s) {
  if (s == 0.0) return b.norm();
  return std::sqrt((lambda.array().pow(2.0 * s) * b.array().square()).sum());
}

double ratio_or_zero(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? kInf : 0.0;
}

const GalerkinSystem& need_sys(const VerifyInputs& in) {
  if (!in.sys || !in.basis || !in.B1 || !in.B2 || !in.forcing)
    throw Error(ErrorKind::InvalidArgument, "verification inputs are incomplete");
  return *in.sys;
}

std::vector<std::size_t> aligned_indices(std::size_t n, int n_t) {
  if (n % static_cast<std::size_t>(n_t) != 0)
    throw Error(ErrorKind::InvalidArgument, "orbit samples must be a multiple of the coupling samples");
  std::vector<std::size_t> idx(n_t);
  for (int j = 0; j < n_t; ++j) idx[j] = j * (n / n_t);
  return idx;
}

struct LiftNorms {
  Eigen::VectorXd coef;  // projection on the basis
  double l2 = 0.0, dt = 0.0, l4 = 0.0, grad = 0.0;
};

struct CouplingSample {
  double t = 0.0;
  double f_l1 = 0.0, f_l2 = 0.0;
  LiftNorms b1, b2;
};

LiftNorms lift_norms(const ExtensionField& B, const StokesBasis& basis, double t) {
  LiftNorms n;
  if (B.zero()) {
    n.coef = Eigen::VectorXd::Zero(basis.k());
    return n;
  }
  const ChannelField v = B.at(t);
  n.coef = basis.project(v);
  n.l2 = std::sqrt(inner(v, v));
  n.l4 = lp_norm(v, 4.0);
  n.grad = std::sqrt(grad_inner(v, v));
  if (!B.steady()) {
    const ChannelField w = B.dt_at(t);
    n.dt = std::sqrt(inner(w, w));
  }
  return n;
}

std::vector<CouplingSample> coupling_samples(const VerifyInputs& in) {
  const GalerkinSystem& sys = *in.sys;
  const auto grid = in.basis->grid_ptr();
  std::vector<CouplingSample> out(sys.n_t);
  parallel_for(sys.n_t, [&](int j) {
    CouplingSample& s = out[j];
    s.t = sys.tau * j / sys.n_t;
    if (!in.forcing->zero()) {
      const ChannelField f = in.forcing->at(grid, s.t);
      s.f_l1 = lp_norm(f, 1.0);
      s.f_l2 = std::sqrt(inner(f, f));
    }
    s.b1 = lift_norms(*in.B1, *in.basis, s.t);
    s.b2 = lift_norms(*in.B2, *in.basis, s.t);
  });
  return out;
}

Eigen::VectorXd weighted(const Eigen::VectorXd& lambda, const Eigen::VectorXd& c, double s) {
  if (s == 0.0) return c;
  return (lambda.array().pow(s) * c.array()).matrix();
}

double series_sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& anchor_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"energy-inequality", "energy inequality of the Galerkin approximations"},
      {"energy-identity", "energy balance with homogeneous boundary data"},
      {"mean-value-time", "mean value time of the dissipation"},
      {"poincare-u", "Poincare bound at the mean value time, velocity"},
      {"poincare-h", "Poincare bound at the mean value time, magnetic field"},
      {"lift-groupings", "lift groupings d2..d6 bounded by M"},
      {"tstar-fractional-bound", "fractional bound at the mean value time"},
      {"fractional-component-bound", "componentwise fractional bound over the period"},
      {"smallness", "smallness condition of the fractional estimate"},
      {"uniform-bound", "uniform bound E mu^(2 gamma - 1) M"},
      {"gradient-sup", "uniform gradient bound via the mean value time"},
      {"higher-order", "bounds on higher time and space derivatives"},
      {"higher-order-drift", "higher derivative bounds under step halving"},
      {"giga-miyakawa", "Giga-Miyakawa bilinear estimate"},
      {"contraction", "exponential contraction of orbit differences"},
      {"uniqueness-gap", "uniqueness of the periodic solution"},
  };
  return table;
}

const std::string& anchor_for(const std::string& name) {
  for (const auto& [n, a] : anchor_table())
    if (n == name) return a;
  throw Error(ErrorKind::InvalidArgument, "no anchor for check " + name);
}

CheckRecord make_check(const std::string& name, double lhs, double rhs, std::string note) {
  CheckRecord r;
  r.name = name;
  r.anchor = anchor_for(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  if (std::isnan(r.margin)) r.margin = -kInf;
  r.pass = r.margin >= 0.0;
  r.note = std::move(note);
  return r;
}

void EstimateReport::set_constant(const std::string& name, double v) {
  for (auto& [n, x] : constants)
    if (n == name) {
      x = v;
      return;
    }
  constants.emplace_back(name, v);
}

double EstimateReport::constant(const std::string& name) const {
  for (const auto& [n, x] : constants)
    if (n == name) return x;
  return std::numeric_limits<double>::quiet_NaN();
}

const CheckRecord* EstimateReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

bool EstimateReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
}

void EstimateReport::write_csv(std::ostream& os) const {
  char buf[96];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "name,anchor,lhs,rhs,margin,pass\n";
  for (const auto& c : checks)
    os << c.name << ",\"" << c.anchor << "\"," << num(c.lhs) << ',' << num(c.rhs) << ',' << num(c.margin) << ','
       << (c.pass ? "true" : "false") << '\n';
}

std::string EstimateReport::summary() const {
  std::ostringstream os;
  if (!header.empty()) os << header << '\n';
  int passed = 0;
  for (const auto& c : checks) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-28s %-4s lhs=%-12.5g rhs=%-12.5g", c.name.c_str(), c.pass ? "ok" : "FAIL",
                  c.lhs, c.rhs);
    os << line;
    if (!c.note.empty()) os << "  (" << c.note << ')';
    os << '\n';
    passed += c.pass;
  }
  os << "  " << passed << '/' << checks.size() << " checks pass\n";
  os << "constants:\n";
  for (const auto& [n, v] : constants) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-10s %.6g\n", n.c_str(), v);
    os << line;
  }
  return os.str();
}

Eigen::MatrixXd spectral_time_derivative(const Eigen::MatrixXd& samples, double tau, int order) {
  const Eigen::Index n = samples.cols();
  Eigen::MatrixXd out(samples.rows(), n);
  if (order == 0 || n == 0) return samples;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(n), spec, back;
  const double w0 = 2.0 * std::numbers::pi / tau;
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    for (Eigen::Index j = 0; j < n; ++j) in[j] = samples(r, j);
    fft.fwd(spec, in);
    for (Eigen::Index m = 0; m < n; ++m) {
      const Eigen::Index freq = m <= n / 2 ? m : m - n;
      if (n % 2 == 0 && m == n / 2 && order % 2 == 1) {
        spec[m] = 0.0;
        continue;
      }
      spec[m] *= std::pow(std::complex<double>(0.0, w0 * static_cast<double>(freq)), order);
    }
    fft.inv(back, spec);
    for (Eigen::Index j = 0; j < n; ++j) out(r, j) = back[j].real();
  }
  return out;
}

Eigen::MatrixXd orbit_samples(const PeriodicOrbit& orbit) {
  if (orbit.y.size() < 2) throw Error(ErrorKind::InvalidArgument, "orbit has no samples");
  const std::size_t n = orbit.y.size() - 1;
  Eigen::MatrixXd Y(orbit.y.front().size(), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) Y.col(static_cast<Eigen::Index>(j)) = orbit.y[j];
  return Y;
}

EnergyCheck energy_inequality_check(const PeriodicOrbit& orbit, const VerifyInputs& in) {
  const GalerkinSystem& sys = need_sys(in);
  const int k = sys.k;
  const double a = sys.params.alpha, nu = sys.params.nu, chi = sys.params.chi;
  const Eigen::MatrixXd Y = orbit_samples(orbit);
  const Eigen::Index n = Y.cols();
  Eigen::MatrixXd En(1, n);
  std::vector<double> diss(n), work(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto c = Y.col(j).head(k), d = Y.col(j).tail(k);
    En(0, j) = 0.5 * (a * c.squaredNorm() + d.squaredNorm());
    diss[j] = nu * (sys.lambda.array() * c.array().square()).sum() +
              chi * (sys.lambda.array() * d.array().square()).sum();
    if (!sys.forcing.is_zero()) work[j] = a * sys.forcing(orbit.t[j]).dot(c);
  }
  const Eigen::MatrixXd dE = spectral_time_derivative(En, sys.tau, 1);
  EnergyCheck out;
  out.lhs.resize(n);
  double resid = 0.0, scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    out.lhs[j] = dE(0, j) + diss[j];
    resid = std::max(resid, std::abs(out.lhs[j] - work[j]));
    scale = std::max({scale, diss[j], std::abs(work[j])});
  }
  const double tol = 1e-7 * scale;
  if (in.B1->zero() && in.B2->zero()) {
    out.has_identity = true;
    out.identity = make_check("energy-identity", resid, tol, "sup over all orbit samples");
  }

  const auto cs = coupling_samples(in);
  const auto idx = aligned_indices(static_cast<std::size_t>(n), sys.n_t);
  std::vector<double> S(sys.n_t);
  double C = 0.0;
  for (int j = 0; j < sys.n_t; ++j) {
    const auto& s = cs[j];
    const double l41 = s.b1.l4 * s.b1.l4, l42 = s.b2.l4 * s.b2.l4;
    S[j] = s.f_l2 * s.f_l2 + s.b1.dt * s.b1.dt + s.b2.dt * s.b2.dt + l41 * l41 + l41 * l42 + l42;
    const double excess = std::max(0.0, out.lhs[idx[j]] - tol);
    C = std::max(C, ratio_or_zero(excess, S[j]));
  }
  out.C = C;
  // A single finite constant must cover every sample.
  out.inequality = make_check("energy-inequality", C, std::numeric_limits<double>::max(),
                              "fitted C, tolerance " + std::to_string(tol));
  return out;
}

MeanValue mean_value_time(const PeriodicOrbit& orbit, const GalerkinSystem& sys) {
  const int k = sys.k;
  const Eigen::MatrixXd Y = orbit_samples(orbit);
  MeanValue mv;
  mv.value = kInf;
  double sum = 0.0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    const auto c = Y.col(j).head(k), d = Y.col(j).tail(k);
    const double D = sys.params.nu * (sys.lambda.array() * c.array().square()).sum() +
                     sys.params.chi * (sys.lambda.array() * d.array().square()).sum();
    sum += D;
    if (D < mv.value) {
      mv.value = D;
      mv.index = static_cast<std::size_t>(j);
    }
  }
  mv.mean = sum / Y.cols();
  mv.t_star = orbit.t[mv.index];
  mv.check = make_check("mean-value-time", mv.value, mv.mean, "t* = " + std::to_string(mv.t_star));
  return mv;
}

EstimateConstants fit_constants(const PeriodicOrbit& orbit, const VerifyInputs& in, double c1_probe) {
  const GalerkinSystem& sys = need_sys(in);
  const int k = sys.k;
  const double g = in.gamma;
  const Eigen::VectorXd& lam = sys.lambda;
  EstimateConstants K;
  K.gamma = g;
  K.mu = lam.minCoeff();
  K.alpha = sys.params.alpha;
  K.nu = sys.params.nu;
  K.chi = sys.params.chi;
  const double a = K.alpha, nu = K.nu, chi = K.chi;

  const ForcingNorms fn = forcing_norms(*in.forcing, in.basis->grid_ptr(), sys.n_t);
  K.M_f = fn.M;
  K.M0 = fn.M0;
  K.M1 = fn.M1;

  const Eigen::MatrixXd Y = orbit_samples(orbit);
  const auto idx = aligned_indices(static_cast<std::size_t>(Y.cols()), sys.n_t);
  const auto cs = coupling_samples(in);
  const auto& V = sys.vec_terms;
  const auto& N = sys.mat_terms;

  Fit C_hat, C2, C3, C4, C5, C6, C7, C8, C9;
  Fit T1, T2, T3, T4, T5, T6, T7, T8;
  Fit C1, T9;
  struct Norms {
    double g1, g1_32, g1_h, g1_2g, g1_a, g2, g2_32, g2_h;
  };
  std::vector<Norms> bn(sys.n_t);
  for (int j = 0; j < sys.n_t; ++j) {
    const auto& s = cs[j];
    Norms& b = bn[j];
    b.g1 = snorm(s.b1.coef, lam, g);
    b.g1_32 = snorm(s.b1.coef, lam, 1.5 * g);
    b.g1_h = snorm(s.b1.coef, lam, g + 0.5);
    b.g1_2g = snorm(s.b1.coef, lam, 2.0 * g);
    b.g1_a = snorm(s.b1.coef, lam, 1.0);
    b.g2 = snorm(s.b2.coef, lam, g);
    b.g2_32 = snorm(s.b2.coef, lam, 1.5 * g);
    b.g2_h = snorm(s.b2.coef, lam, g + 0.5);

    const Eigen::VectorXd c = Y.col(idx[j]).head(k), d = Y.col(idx[j]).tail(k);
    const Eigen::VectorXd pu = weighted(lam, c, 2.0 * g), ph = weighted(lam, d, 2.0 * g);
    const double Xu = snorm(c, lam, g + 0.5), Xh = snorm(d, lam, g + 0.5);
    const double Agu = snorm(c, lam, g), Agh = snorm(d, lam, g);

    C_hat.add(V.at("F").col(j).dot(pu), s.f_l1 * Xu);
    C2.add(V.at("B1t").col(j).dot(pu), s.b1.dt * Xu);
    C3.add(V.at("AB1").col(j).dot(pu), b.g1_a * Xu);
    C4.add(V.at("B1B1").col(j).dot(pu), b.g1_2g * b.g1_h * Xu);
    C5.add((N.at("N1B1")[j] * c).dot(pu), b.g1_32 * Xu * Xu);
    C6.add((N.at("N2B1")[j] * c).dot(pu), b.g1 * Xu * Xu);
    C7.add((N.at("N2B2")[j] * d).dot(pu), b.g2 * Xh * Xu);
    C8.add((N.at("N1B2")[j] * d).dot(pu), b.g2_32 * Xh * Xu);
    C9.add(V.at("B2B2").col(j).dot(pu), b.g2 * b.g2_h * Xu);

    T1.add(V.at("B2t").col(j).dot(ph), s.b2.dt * Xh);
    T2.add(chi * V.at("AB2").col(j).dot(ph), b.g2_h * Xh);
    T3.add((N.at("N2B1")[j] * d).dot(ph), b.g1 * Xh * Xh);
    T4.add((N.at("N1B1")[j] * d).dot(ph), b.g1_32 * Xh * Xh);
    T5.add((N.at("N1B2")[j] * c).dot(ph), Xu * b.g2_32 * Xh);
    T6.add(V.at("B2B1").col(j).dot(ph), b.g2 * b.g1_h * Xh);
    T7.add((N.at("N2B2")[j] * c).dot(ph), b.g2 * Xu * Xh);
    T8.add(V.at("B1B2").col(j).dot(ph), b.g1 * b.g2_h * Xh);

    if (sys.nonlinear) {
      C1.add(quadratic(sys, c, c).dot(pu), Agu * Xu * Xu);
      C1.add(std::abs(quadratic(sys, d, d).dot(pu)) + std::abs(quadratic(sys, d, c).dot(ph)), 2.0 * Agh * Xh * Xu);
      T9.add(quadratic(sys, c, d).dot(ph), Agu * Xh * Xh);
    }

    K.L1B = std::max(K.L1B, s.b1.l2 + s.b1.dt + s.b1.grad + b.g1_a);
    K.L2B = std::max(K.L2B, s.b2.l2 + s.b2.dt + s.b2.grad + snorm(s.b2.coef, lam, 1.0));
  }
  K.C_hat = C_hat.c;
  K.C = {0, 0, C2.c, C3.c, C4.c, C5.c, C6.c, C7.c, C8.c, C9.c};
  K.C_tilde = {0, T1.c, T2.c, T3.c, T4.c, T5.c, T6.c, T7.c, T8.c};
  K.C1_orbit = C1.c;
  K.C1_probe = std::max(0.0, c1_probe);
  K.C1 = std::max(K.C1_orbit, K.C1_probe);
  K.C9_tilde = T9.c;

  for (int j = 0; j < sys.n_t; ++j) {
    const auto& s = cs[j];
    const Norms& b = bn[j];
    K.d2 = std::max(K.d2, a * C2.c * s.b1.dt + nu * C3.c * b.g1_a + a * C4.c * b.g1_2g * b.g1_h +
                              C9.c * b.g2 * b.g2_h);
    K.d3 = std::max(K.d3, T1.c * s.b2.dt + T2.c * b.g2_h + T6.c * b.g2 * b.g1_h + T8.c * b.g1 * b.g2_h);
    K.d4 = std::max(K.d4, C7.c * b.g2 + C8.c * b.g2_32 + T5.c * b.g2_32 + T7.c * b.g2);
    K.d5 = std::max(K.d5, C5.c * b.g1_32 + C6.c * b.g1);
    K.d6 = std::max(K.d6, T3.c * b.g1 + T4.c * b.g1_32);
  }
  // Inf * 0 products above come from unbounded fits on vanishing norms.
  for (double* d : {&K.d2, &K.d3, &K.d4, &K.d5, &K.d6})
    if (std::isnan(*d)) *d = kInf;
  K.z = a * K.C_hat + 1.0;
  K.M = std::max({K.M_f, K.d2, K.d3, K.d4, K.d5, K.d6});

  double sumD = 0.0, minD = kInf;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    const auto c = Y.col(j).head(k), d = Y.col(j).tail(k);
    const double D = nu * (lam.array() * c.array().square()).sum() + chi * (lam.array() * d.array().square()).sum();
    sumD += D;
    minD = std::min(minD, D);
  }
  const double intD = sumD * sys.tau / Y.cols();
  const double M2 = K.M * K.M;
  K.d0 = M2 > 0.0 ? intD / M2 : 0.0;
  K.d1 = M2 > 0.0 ? minD / M2 : 0.0;
  K.E = K.d0 / chi + K.d0 / nu;

  const double mu = K.mu, Cb = K.C_bar;
  const double lo = std::pow(mu, g - 0.5), hi = std::pow(mu, -g);
  const double su = std::sqrt(K.d0 / nu), sh = std::sqrt(K.d0 / chi);
  // M = 0 leaves d0 undetermined; the terms carrying 1/d0 are dropped.
  const double inv_u = K.M > 0.0 ? ratio_or_zero(std::sqrt(nu), std::sqrt(K.d0)) : 0.0;
  const double inv_h = K.M > 0.0 ? ratio_or_zero(std::sqrt(chi), std::sqrt(K.d0)) : 0.0;
  auto prod = [](double x, double y) { return (x == 0.0 || y == 0.0) ? 0.0 : x * y; };
  K.P1 = prod(K.z, inv_u) * hi + K.C1 * a * su * lo + K.d5 + K.d4 * Cb + 2.0 * K.C1 * sh * lo * Cb;
  K.P2 = prod(K.d3, inv_h) * hi + K.C9_tilde * su * lo + K.d6 + K.d4 * std::sqrt(K.M) * Cb +
         2.0 * K.C1 * sh * lo * Cb;
  return K;
}

UniformBoundResult lemma7_certificate(const PeriodicOrbit& orbit, const Eigen::VectorXd& lambda, const EstimateConstants& K) {
  const int k = orbit.k;
  UniformBoundResult r;
  for (std::size_t j = 0; j + 1 < orbit.y.size(); ++j)
    r.sup_lhs = std::max(r.sup_lhs, std::pow(snorm(orbit.y[j].head(k), lambda, K.gamma), 2) +
                                        std::pow(snorm(orbit.y[j].tail(k), lambda, K.gamma), 2));
  const double b1 = K.P1 > 0.0 ? std::pow(K.nu / K.P1, 2) : kInf;
  const double b2 = K.P2 > 0.0 ? std::pow(K.chi / K.P2, 2) : kInf;
  const double bound = std::min({b1, b2, 1.0});
  r.smallness = make_check("smallness", K.M, bound, "M against min{(nu/P1)^2, (chi/P2)^2, 1}");
  if (K.M >= bound) {
    r.smallness.pass = false;
    if (r.smallness.margin >= 0.0) r.smallness.margin = -0.0;
  }
  const double rhs = K.E * std::pow(K.mu, 2.0 * K.gamma - 1.0) * K.M;
  r.bound = make_check("uniform-bound", r.sup_lhs, rhs,
                       r.smallness.pass ? "smallness holds" : "smallness fails, bound not implied");
  return r;
}

std::vector<double> HigherOrder::values() const {
  return {sup_grad_u, sup_grad_h, sup_ut, sup_ht, sup_Au, sup_Ah, int_Aut2, int_utt2};
}

HigherOrder higher_order_report(const PeriodicOrbit& orbit, const GalerkinSystem& sys) {
  const int k = sys.k;
  const Eigen::ArrayXd lam = sys.lambda.array();
  const Eigen::MatrixXd Y = orbit_samples(orbit);
  const Eigen::MatrixXd Yt = spectral_time_derivative(Y, sys.tau, 1);
  const Eigen::MatrixXd Ytt = spectral_time_derivative(Y, sys.tau, 2);
  const Eigen::Index n = Y.cols();
  const double dt = sys.tau / n;
  HigherOrder h;
  double min_A = kInf, sum_A = 0.0, grad_at_min = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::ArrayXd c = Y.col(j).head(k).array(), d = Y.col(j).tail(k).array();
    const Eigen::ArrayXd ct = Yt.col(j).head(k).array(), dtt = Yt.col(j).tail(k).array();
    const double gu = (lam * c.square()).sum(), gh = (lam * d.square()).sum();
    const double Au = (lam.square() * c.square()).sum(), Ah = (lam.square() * d.square()).sum();
    h.sup_grad_u = std::max(h.sup_grad_u, std::sqrt(gu));
    h.sup_grad_h = std::max(h.sup_grad_h, std::sqrt(gh));
    h.sup_ut = std::max(h.sup_ut, std::sqrt(ct.square().sum()));
    h.sup_ht = std::max(h.sup_ht, std::sqrt(dtt.square().sum()));
    h.sup_Au = std::max(h.sup_Au, std::sqrt(Au));
    h.sup_Ah = std::max(h.sup_Ah, std::sqrt(Ah));
    h.int_Aut2 += dt * (lam.square() * ct.square()).sum();
    h.int_utt2 += dt * Ytt.col(j).squaredNorm();
    sum_A += Au + Ah;
    if (Au + Ah < min_A) {
      min_A = Au + Ah;
      grad_at_min = gu + gh;
    }
  }
  int bad = 0;
  for (double v : h.values()) bad += !std::isfinite(v);
  h.check = make_check("higher-order", bad, 0.0, "count of non-finite quantities");
  h.gradient = make_check("gradient-sup", grad_at_min, sum_A / n / sys.lambda.minCoeff(),
                          "|grad|^2 at the minimizer of |Au|^2+|Ah|^2 against mu^-1 times its mean");
  return h;
}

double higher_order_drift(const HigherOrder& a, const HigherOrder& b) {
  const auto va = a.values(), vb = b.values();
  double scale = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) scale = std::max({scale, std::abs(va[i]), std::abs(vb[i])});
  double drift = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double m = std::max(std::abs(va[i]), std::abs(vb[i]));
    if (m <= 1e-10 * scale) continue;
    drift = std::max(drift, std::abs(va[i] - vb[i]) / m);
  }
  return drift;
}

GigaMiyakawa giga_miyakawa_probe(const StokesBasis& basis, double delta, double theta, double rho, int trials,
                                 std::uint64_t seed) {
  if (!(delta + theta + rho >= 1.0) || !(rho + delta > 0.5) || !(theta >= 0.0) || !(rho > 0.0) || !(delta >= 0.0))
    throw Error(ErrorKind::ParameterConstraintViolated, "exponents violate delta + theta + rho >= 1, "
                                                        "rho + delta > 1/2, theta >= 0, rho > 0");
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be positive");
  const Eigen::VectorXd lam = basis.lambdas();
  const Eigen::Index k = lam.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> A(trials, Eigen::VectorXd(k)), B(trials, Eigen::VectorXd(k));
  for (int t = 0; t < trials; ++t)
    for (Eigen::Index i = 0; i < k; ++i) {
      A[t](i) = normal(rng);
      B[t](i) = normal(rng);
    }
  std::vector<double> ratio(trials, 0.0);
  parallel_for(trials, [&](int t) {
    const double den = snorm(A[t], lam, theta) * snorm(B[t], lam, rho);
    if (!(den > 0.0)) return;
    const Eigen::VectorXd q = basis.project(advect(basis.reconstruct(A[t]), basis.reconstruct(B[t])));
    ratio[t] = snorm(q, lam, -delta) / den;
  });
  GigaMiyakawa g;
  g.delta = delta;
  g.theta = theta;
  g.rho = rho;
  g.trials = trials;
  g.c1 = series_sup(ratio);
  return g;
}

CheckRecord uniqueness_gap_check(const PeriodicOrbit& a, const PeriodicOrbit& b, double alpha) {
  if (a.y.size() != b.y.size() || a.k != b.k)
    return make_check("uniqueness-gap", kInf, 0.0, "orbits live on different grids");
  double gap = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < a.y.size(); ++j) {
    gap = std::max(gap, std::pow(energy_norm(a.y[j] - b.y[j], alpha), 2));
    scale = std::max({scale, std::pow(energy_norm(a.y[j], alpha), 2), std::pow(energy_norm(b.y[j], alpha), 2)});
  }
  return make_check("uniqueness-gap", gap, 1e-10 * scale, "sup of alpha|w|^2 + |z|^2");
}

CheckRecord contraction_check(const DecayReport& decay) {
  double worst = 0.0;
  for (double r : decay.ratios) worst = std::max(worst, std::isnan(r) ? kInf : r);
  if (decay.ratios.empty()) worst = kInf;
  std::ostringstream note;
  note << "periods=" << decay.ratios.size() << " q_emp=" << decay.q_emp << " l_emp=" << decay.l_emp;
  if (decay.roundoff_limited) note << " (separation fell below orbit roundoff)";
  CheckRecord r = make_check("contraction", worst, std::nextafter(1.0, 0.0), note.str());
  if (!decay.monotone || !(decay.q_emp > 0.0)) {
    r.pass = false;
    if (r.margin >= 0.0) r.margin = -0.0;
  }
  return r;
}

EstimateReport verify_orbit(const PeriodicOrbit& orbit, const VerifyInputs& in, const VerifyOptions& opt) {
  const GalerkinSystem& sys = need_sys(in);
  const int k = sys.k;
  const Eigen::VectorXd& lam = sys.lambda;
  EstimateReport rep;
  rep.header =
      "viscosity constants in the mean value bounds are nu and chi; overline C = 1/2; "
      "M = max(forcing sup, lift groupings d2..d6); gamma = " +
      std::to_string(in.gamma);

  double c1_probe = opt.c1_probe;
  if (c1_probe < 0.0 && opt.probe_trials > 0) {
    const GigaMiyakawa gm = giga_miyakawa_probe(*in.basis, 0.0, in.gamma, 1.0, opt.probe_trials, opt.seed);
    c1_probe = gm.c1;
    rep.add(make_check("giga-miyakawa", gm.c1, std::numeric_limits<double>::max(),
                       "max ratio over " + std::to_string(gm.trials) + " random pairs, (delta,theta,rho)=(0,gamma,1)"));
  }

  const EnergyCheck ec = energy_inequality_check(orbit, in);
  rep.add(ec.inequality);
  if (ec.has_identity) rep.add(ec.identity);

  const MeanValue mv = mean_value_time(orbit, sys);
  rep.add(mv.check);

  const EstimateConstants K = fit_constants(orbit, in, c1_probe);
  const double M2 = K.M * K.M;
  const Eigen::VectorXd& ys = orbit.y[mv.index];
  const Eigen::VectorXd cs = ys.head(k), ds = ys.tail(k);
  const double mu = K.mu;
  rep.add(make_check("poincare-u", (lam.array() * cs.array().square()).sum() / mu, K.d0 * M2 / K.nu,
                     "|u(t*)|^2 = " + std::to_string(cs.squaredNorm())));
  rep.add(make_check("poincare-h", (lam.array() * ds.array().square()).sum() / mu, K.d0 * M2 / K.chi,
                     "|h(t*)|^2 = " + std::to_string(ds.squaredNorm())));
  rep.add(make_check("lift-groupings", std::max({K.d2, K.d3, K.d4, K.d5, K.d6}), K.M,
                     "forcing sup alone: " + std::to_string(K.M_f)));

  const double ru = std::sqrt(K.d0 / K.nu) * std::pow(mu, in.gamma - 0.5) * std::sqrt(K.M);
  const double rh = std::sqrt(K.d0 / K.chi) * std::pow(mu, in.gamma - 0.5) * std::sqrt(K.M);
  const std::string m_note = K.M < 1.0 ? "M < 1" : "M >= 1, bound not implied";
  rep.add(make_check("tstar-fractional-bound",
                     std::max(ratio_or_zero(snorm(cs, lam, in.gamma), ru), ratio_or_zero(snorm(ds, lam, in.gamma), rh)),
                     1.0, m_note));
  double sup_u = 0.0, sup_h = 0.0;
  for (std::size_t j = 0; j + 1 < orbit.y.size(); ++j) {
    sup_u = std::max(sup_u, snorm(orbit.y[j].head(k), lam, in.gamma));
    sup_h = std::max(sup_h, snorm(orbit.y[j].tail(k), lam, in.gamma));
  }
  rep.add(make_check("fractional-component-bound", std::max(ratio_or_zero(sup_u, ru), ratio_or_zero(sup_h, rh)), 1.0,
                     "ratio to (d0/visc)^(1/2) mu^(gamma-1/2) M^(1/2)"));

  const UniformBoundResult l7 = lemma7_certificate(orbit, lam, K);
  rep.add(l7.smallness);
  rep.add(l7.bound);

  const HigherOrder ho = higher_order_report(orbit, sys);
  rep.add(ho.gradient);
  rep.add(ho.check);

  rep.set_constant("M", K.M);
  rep.set_constant("M_f", K.M_f);
  rep.set_constant("M0", K.M0);
  rep.set_constant("M1", K.M1);
  const double ds_[] = {K.d0, K.d1, K.d2, K.d3, K.d4, K.d5, K.d6};
  for (int i = 0; i < 7; ++i) rep.set_constant("d" + std::to_string(i), ds_[i]);
  rep.set_constant("z", K.z);
  rep.set_constant("E", K.E);
  rep.set_constant("P1", K.P1);
  rep.set_constant("P2", K.P2);
  rep.set_constant("L1B", K.L1B);
  rep.set_constant("L2B", K.L2B);
  rep.set_constant("C_energy", ec.C);
  rep.set_constant("C_hat", K.C_hat);
  rep.set_constant("C1", K.C1);
  rep.set_constant("C1_orbit", K.C1_orbit);
  rep.set_constant("C1_probe", K.C1_probe);
  for (int i = 2; i <= 9; ++i) rep.set_constant("C" + std::to_string(i), K.C[i]);
  for (int i = 1; i <= 8; ++i) rep.set_constant("Ct" + std::to_string(i), K.C_tilde[i]);
  rep.set_constant("Ct9", K.C9_tilde);
  rep.set_constant("t_star", mv.t_star);
  for (const auto& [name, v] : std::vector<std::pair<std::string, double>>{
           {"sup_grad_u", ho.sup_grad_u}, {"sup_grad_h", ho.sup_grad_h}, {"sup_u_t", ho.sup_ut},
           {"sup_h_t", ho.sup_ht}, {"sup_Au", ho.sup_Au}, {"sup_Ah", ho.sup_Ah},
           {"int_Au_t2", ho.int_Aut2}, {"int_utt2", ho.int_utt2}})
    rep.set_constant(name, v);
  return rep;
}

}  // namespace mhdp
