#include "mhdp/periodic_series.hpp"

#include <cmath>
#include <numbers>

#include "mhdp/errors.hpp"

namespace mhdp {

PeriodicSeries::PeriodicSeries(double tau, const Eigen::MatrixXd& samples, double rel_drop)
    : tau_(tau), n_t_(static_cast<int>(samples.cols())), samples_(samples) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  if (n_t_ < 1) throw Error(ErrorKind::InvalidArgument, "need at least one sample");
  const double scale = samples.size() ? samples.cwiseAbs().maxCoeff() : 0.0;
  zero_ = scale == 0.0;
  mean_ = samples.rowwise().mean();
  const double cut = rel_drop * scale;
  for (int h = 1; h <= n_t_ / 2; ++h) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(samples.rows());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(samples.rows());
    const bool nyquist = (2 * h == n_t_);
    const double w = nyquist ? 1.0 / n_t_ : 2.0 / n_t_;
    for (int j = 0; j < n_t_; ++j) {
      const double th = 2.0 * std::numbers::pi * h * j / n_t_;
      a.noalias() += (w * std::cos(th)) * samples.col(j);
      if (!nyquist) b.noalias() += (w * std::sin(th)) * samples.col(j);
    }
    const double mag = std::max(a.cwiseAbs().maxCoeff(), b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
    if (mag > cut && mag > 0.0) {
      harm_.push_back(h);
      cos_.push_back(std::move(a));
      sin_.push_back(std::move(b));
    }
  }
}

Eigen::VectorXd PeriodicSeries::operator()(double t) const {
  Eigen::VectorXd v = mean_;
  const double w = 2.0 * std::numbers::pi / tau_;
  for (std::size_t i = 0; i < harm_.size(); ++i) {
    const double th = w * harm_[i] * t;
    v.noalias() += std::cos(th) * cos_[i] + std::sin(th) * sin_[i];
  }
  return v;
}

Eigen::VectorXd PeriodicSeries::derivative(double t) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mean_.size());
  const double w = 2.0 * std::numbers::pi / tau_;
  for (std::size_t i = 0; i < harm_.size(); ++i) {
    const double om = w * harm_[i];
    const double th = om * t;
    v.noalias() += (-om * std::sin(th)) * cos_[i] + (om * std::cos(th)) * sin_[i];
  }
  return v;
}

Eigen::VectorXd PeriodicSeries::sample(int j) const {
  const int jj = ((j % n_t_) + n_t_) % n_t_;
  return samples_.col(jj);
}

}  // namespace mhdp
