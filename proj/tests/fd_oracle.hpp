#pragma once

// Second-order finite-difference Stokes eigenvalues of one x-wavenumber
// block on a uniform grid, independent of the spectral construction.
//   kappa = 0: -a'' = lambda a, a(0) = a(gap) = 0
//   kappa > 0: (D^2 - kappa^2)^2 phi = -lambda (D^2 - kappa^2) phi,
//              phi = phi' = 0 on both walls
// Returns ascending eigenvalues.

#include <Eigen/Dense>

inline Eigen::VectorXd fd_stokes_eigenvalues(double kappa, double gap, int n) {
  const double h = gap / (n + 1);
  Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    D2(i, i) = -2.0 / (h * h);
    if (i > 0) D2(i, i - 1) = 1.0 / (h * h);
    if (i + 1 < n) D2(i, i + 1) = 1.0 / (h * h);
  }
  const Eigen::MatrixXd L = D2 - kappa * kappa * Eigen::MatrixXd::Identity(n, n);
  if (kappa == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-L);
    return es.eigenvalues();
  }
  Eigen::MatrixXd B = L * L;
  // Clamped wall: ghost value phi_{-1} = phi_1 turns the 6 of the
  // biharmonic stencil into 7 next to each wall.
  B(0, 0) += 2.0 / std::pow(h, 4);
  B(n - 1, n - 1) += 2.0 / std::pow(h, 4);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(B, -L);
  return es.eigenvalues();
}
