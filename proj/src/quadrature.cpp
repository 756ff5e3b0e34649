#include "mhdp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mhdp/errors.hpp"

namespace mhdp {

Rule1d gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "gauss_legendre needs n >= 1");
  Rule1d rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Rule1d gauss_legendre(int n, double a, double b) {
  Rule1d ref = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    ref.nodes[i] = mid + half * ref.nodes[i];
    ref.weights[i] *= half;
  }
  return ref;
}

std::vector<double> graded_wall_breaks(double gap, double h_min) {
  const double quarter = 0.25 * gap;
  std::vector<double> lower{0.0};
  double h = std::min(h_min, quarter);
  while (h < quarter) {
    lower.push_back(h);
    h *= 2.0;
  }
  lower.push_back(quarter);
  std::vector<double> breaks = lower;
  for (auto it = lower.rbegin(); it != lower.rend(); ++it) {
    const double y = gap - *it;
    if (y > breaks.back()) breaks.push_back(y);
  }
  return breaks;
}

Rule1d graded_wall_rule(double gap, double h_min, int points_per_panel) {
  const auto breaks = graded_wall_breaks(gap, h_min);
  Rule1d rule;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const Rule1d panel = gauss_legendre(points_per_panel, breaks[p], breaks[p + 1]);
    rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return rule;
}

LegendreTable legendre(int nmax, double s) {
  LegendreTable t;
  t.p.assign(nmax + 1, 0.0);
  t.dp.assign(nmax + 1, 0.0);
  t.ddp.assign(nmax + 1, 0.0);
  t.p[0] = 1.0;
  if (nmax >= 1) {
    t.p[1] = s;
    t.dp[1] = 1.0;
  }
  for (int n = 1; n < nmax; ++n) {
    t.p[n + 1] = ((2.0 * n + 1.0) * s * t.p[n] - n * t.p[n - 1]) / (n + 1.0);
    // P'_{n+1} = P'_{n-1} + (2n+1) P_n, and the same one derivative up.
    t.dp[n + 1] = t.dp[n - 1] + (2.0 * n + 1.0) * t.p[n];
    t.ddp[n + 1] = t.ddp[n - 1] + (2.0 * n + 1.0) * t.dp[n];
  }
  return t;
}

}  // namespace mhdp
