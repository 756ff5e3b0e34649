#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "mhdp/boundary_extension.hpp"
#include "mhdp/harmonic_file.hpp"
#include "mhdp/periodic_series.hpp"
#include "mhdp/spectral_domain.hpp"

namespace mhdp {

/// Body force f(x, y, t) as a sum of ForcingHarmonic terms, tau-periodic.
struct ForcingSpec {
  double tau = 1.0;
  std::vector<ForcingHarmonic> terms;

  bool zero() const;
  ChannelField at(const std::shared_ptr<const Grid>& grid, double t) const;
  ChannelField dt_at(const std::shared_ptr<const Grid>& grid, double t) const;
};

struct ForcingNorms {
  double M = 0.0;   // sup_t ||f||_{L^{n/2}}, n = 2
  double M0 = 0.0;  // (int_0^tau |f|^2 dt)^{1/2}
  double M1 = 0.0;  // (int_0^tau |f_t|^2 dt)^{1/2}
  double sup_l2 = 0.0;
};

/// Norms over n_t equispaced samples (trapezoid in t, exact for the
/// forcing's trigonometric content when n_t exceeds twice its top harmonic).
ForcingNorms forcing_norms(const ForcingSpec& f, const std::shared_ptr<const Grid>& grid, int n_t = 64);

struct ModelParams {
  double alpha = 1.0;
  double nu = 1.0;
  double chi = 1.0;
};

/// Galerkin form of the shifted MHD system.  With T[i][j][l] =
/// ((w_i . grad) w_j, w_l), Q(a, b)_l = sum T[i][j][l] a_i b_j,
/// N1[B](l, i) = ((w_i . grad) B, w_l) and N2[B](l, i) = ((B . grad) w_i, w_l):
///
///   alpha c' = alpha F - nu L c - alpha Q(c,c) + Q(d,d)
///              - alpha (B1)_t - nu A B1 - alpha (B1.grad B1) + (B2.grad B2)
///              - (N1[B1] + N2[B1]) c + (N1[B2] + N2[B2]) d
///   d'       = - chi L d - Q(c,d) + Q(d,c)
///              - (B2)_t - chi A B2 + (B2.grad B1) - (B1.grad B2)
///              + (N2[B2] - N1[B2]) c + (N1[B1] - N2[B1]) d
///
/// where every B-term means its projection on w_j and (A B, w_j) is taken as
/// (grad B, grad w_j).  Only the u.grad u and B1.grad B1 products carry alpha.
struct GalerkinSystem {
  int k = 0;
  double tau = 1.0;
  ModelParams params;
  bool nonlinear = true;
  Eigen::VectorXd lambda;

  std::vector<double> T;  // T[(i * k + j) * k + l]
  struct Entry {
    int i, j, l;
    double v;
  };
  std::vector<Entry> t_nz;

  // Combined time-dependent parts (see the formula above).
  PeriodicSeries g_u, g_h;               // k-vectors
  PeriodicSeries ju_c, ju_d, jh_c, jh_d;  // k x k, column-major flattened
  PeriodicSeries forcing;                // (f, w_j)

  // Individual couplings at the sample times, for inspection and tests.
  // Vectors: "B1t", "AB1", "B1B1", "B2B2", "B2B1", "B1B2", "B2t", "AB2",
  // "F".  Matrices: "N1B1", "N2B1", "N1B2", "N2B2".
  std::map<std::string, Eigen::MatrixXd> vec_terms;               // k x n_t
  std::map<std::string, std::vector<Eigen::MatrixXd>> mat_terms;  // n_t of k x k
  int n_t = 64;

  double tensor(int i, int j, int l) const { return T[(static_cast<std::size_t>(i) * k + j) * k + l]; }
};

struct AssemblyOptions {
  bool nonlinear = true;
  int n_t = 64;
};

GalerkinSystem assemble(const StokesBasis& basis, const ExtensionField& B1, const ExtensionField& B2,
                        const ForcingSpec& f, const ModelParams& params,
                        const AssemblyOptions& opt = {});

/// Q(a, b) from the tensor.
Eigen::VectorXd quadratic(const GalerkinSystem& sys, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct Rhs {
  Eigen::VectorXd u;  // alpha c'
  Eigen::VectorXd h;  // d'
};

/// Full right-hand side of the Galerkin system at (t, c, d).
Rhs rhs_nonlinear(const GalerkinSystem& sys, double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d);

/// Right-hand side of the linearized problem with frozen fields (v, b):
/// alpha c' + nu L c = out.u and d' + chi L d = out.h, i.e. everything except
/// the stiff diagonal terms, evaluated at (v, b).
Rhs rhs_linearized(const GalerkinSystem& sys, double t, const Eigen::VectorXd& v, const Eigen::VectorXd& b);

/// d(rhs_nonlinear)/d(c, d) as a 2k x 2k matrix (rows: u block then h block).
Eigen::MatrixXd jacobian(const GalerkinSystem& sys, double t, const Eigen::VectorXd& c, const Eigen::VectorXd& d);

/// Projection of (F . grad) G computed by sampling on the physical grid,
/// multiplying pointwise and analyzing back (the pseudo-spectral route).
Eigen::VectorXd convect_on_grid(const ChannelField& F, const ChannelField& G, const StokesBasis& basis);

/// rhs_nonlinear evaluated with every state-dependent product formed on the
/// physical grid instead of through T.  Couplings with B still use the
/// assembled arrays.
Rhs rhs_nonlinear_grid(const GalerkinSystem& sys, const StokesBasis& basis, double t,
                       const Eigen::VectorXd& c, const Eigen::VectorXd& d);

}  // namespace mhdp
