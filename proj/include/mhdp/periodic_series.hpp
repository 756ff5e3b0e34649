#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mhdp {

/// Trigonometric interpolant of a tau-periodic vector-valued function given
/// at n_t equispaced samples t_j = j tau / n_t.  Harmonics whose coefficients
/// are below a relative threshold are dropped, so evaluation cost scales with
/// the temporal content of the data rather than with n_t.
class PeriodicSeries {
 public:
  PeriodicSeries() = default;
  /// samples: one column per sample time.
  PeriodicSeries(double tau, const Eigen::MatrixXd& samples, double rel_drop = 1e-14);

  double tau() const { return tau_; }
  Eigen::Index size() const { return mean_.size(); }
  int n_samples() const { return n_t_; }
  bool steady() const { return harm_.empty(); }
  const std::vector<int>& harmonics() const { return harm_; }
  const Eigen::VectorXd& mean() const { return mean_; }

  Eigen::VectorXd operator()(double t) const;
  /// d/dt of the interpolant.
  Eigen::VectorXd derivative(double t) const;
  /// The stored sample at index j (wrapped modulo n_t).
  Eigen::VectorXd sample(int j) const;
  bool is_zero() const { return zero_; }

 private:
  double tau_ = 1.0;
  int n_t_ = 0;
  bool zero_ = true;
  Eigen::VectorXd mean_;
  std::vector<int> harm_;
  std::vector<Eigen::VectorXd> cos_, sin_;
  Eigen::MatrixXd samples_;
};

}  // namespace mhdp
