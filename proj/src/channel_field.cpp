#include "mhdp/channel_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mhdp/errors.hpp"

namespace mhdp {

double Grid::wavenumber(int m) const { return 2.0 * std::numbers::pi * m / length_x; }

std::vector<double> Grid::x_points() const {
  std::vector<double> xs(nx);
  for (int i = 0; i < nx; ++i) xs[i] = length_x * i / nx;
  return xs;
}

Harmonic& ChannelField::at(int m, bool with_dy) {
  auto it = std::lower_bound(harm_.begin(), harm_.end(), m,
                             [](const Harmonic& h, int mm) { return h.m < mm; });
  if (it == harm_.end() || it->m != m) {
    Harmonic h;
    h.m = m;
    const std::size_t n = grid_->ny();
    h.vx.assign(n, 0.0);
    h.vy.assign(n, 0.0);
    if (with_dy) {
      h.dvx.assign(n, 0.0);
      h.dvy.assign(n, 0.0);
    }
    it = harm_.insert(it, std::move(h));
  } else if (with_dy && !it->has_dy()) {
    it->dvx.assign(grid_->ny(), 0.0);
    it->dvy.assign(grid_->ny(), 0.0);
  }
  return *it;
}

const Harmonic* ChannelField::find(int m) const {
  auto it = std::lower_bound(harm_.begin(), harm_.end(), m,
                             [](const Harmonic& h, int mm) { return h.m < mm; });
  return (it != harm_.end() && it->m == m) ? &*it : nullptr;
}

void ChannelField::add_scaled(double a, const ChannelField& other) {
  if (!grid_) grid_ = other.grid_ptr();
  for (const Harmonic& h : other.harmonics()) {
    Harmonic& dst = at(h.m, h.has_dy());
    for (std::size_t i = 0; i < h.vx.size(); ++i) {
      dst.vx[i] += a * h.vx[i];
      dst.vy[i] += a * h.vy[i];
    }
    if (h.has_dy()) {
      for (std::size_t i = 0; i < h.dvx.size(); ++i) {
        dst.dvx[i] += a * h.dvx[i];
        dst.dvy[i] += a * h.dvy[i];
      }
    }
  }
}

void ChannelField::scale(double a) {
  for (Harmonic& h : harm_) {
    for (auto* v : {&h.vx, &h.vy, &h.dvx, &h.dvy})
      for (cplx& z : *v) z *= a;
  }
}

std::pair<double, double> ChannelField::value(double x, std::size_t iy) const {
  double vx = 0.0, vy = 0.0;
  for (const Harmonic& h : harm_) {
    const cplx e = std::polar(1.0, grid_->wavenumber(h.m) * x);
    vx += (h.vx[iy] * e).real();
    vy += (h.vy[iy] * e).real();
  }
  return {vx, vy};
}

namespace {

double harmonic_weight(const Grid& g, int m) { return m == 0 ? g.length_x : 0.5 * g.length_x; }

void check_same_grid(const ChannelField& f, const ChannelField& g) {
  if (f.grid().id != g.grid().id)
    throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

// Accumulates the product of two scalar series harmonics p (index a) and
// q (index b) into the sum and difference harmonics of `out`.
void accumulate_product(std::vector<cplx>& sum_dst, std::vector<cplx>* diff_dst, int a, int b,
                        std::span<const cplx> p, std::span<const cplx> q) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) sum_dst[i] += 0.5 * p[i] * q[i];
  if (!diff_dst) return;
  auto& d = *diff_dst;
  if (a >= b) {
    for (std::size_t i = 0; i < n; ++i) d[i] += 0.5 * p[i] * std::conj(q[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) d[i] += 0.5 * std::conj(p[i]) * q[i];
  }
}

}  // namespace

double inner(const ChannelField& f, const ChannelField& g) {
  if (f.empty() || g.empty()) return 0.0;
  check_same_grid(f, g);
  const Grid& grid = f.grid();
  double total = 0.0;
  for (const Harmonic& hf : f.harmonics()) {
    const Harmonic* hg = g.find(hf.m);
    if (!hg) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < grid.ny(); ++i) {
      s += grid.wy[i] * (hf.vx[i] * std::conj(hg->vx[i]) + hf.vy[i] * std::conj(hg->vy[i])).real();
    }
    total += harmonic_weight(grid, hf.m) * s;
  }
  return total;
}

double grad_inner(const ChannelField& f, const ChannelField& g) {
  if (f.empty() || g.empty()) return 0.0;
  check_same_grid(f, g);
  const Grid& grid = f.grid();
  double total = 0.0;
  for (const Harmonic& hf : f.harmonics()) {
    const Harmonic* hg = g.find(hf.m);
    if (!hg) continue;
    if (!hf.has_dy() || !hg->has_dy())
      throw Error(ErrorKind::InvalidArgument, "grad_inner needs y-derivatives");
    const double k2 = std::pow(grid.wavenumber(hf.m), 2);
    double s = 0.0;
    for (std::size_t i = 0; i < grid.ny(); ++i) {
      s += grid.wy[i] *
           (k2 * (hf.vx[i] * std::conj(hg->vx[i]) + hf.vy[i] * std::conj(hg->vy[i])) +
            hf.dvx[i] * std::conj(hg->dvx[i]) + hf.dvy[i] * std::conj(hg->dvy[i]))
               .real();
    }
    total += harmonic_weight(grid, hf.m) * s;
  }
  return total;
}

ChannelField advect(const ChannelField& f, const ChannelField& g) {
  ChannelField out(f.empty() ? g.grid_ptr() : f.grid_ptr());
  if (f.empty() || g.empty()) return out;
  check_same_grid(f, g);
  const Grid& grid = f.grid();
  const std::size_t n = grid.ny();
  std::vector<cplx> dxg_x(n), dxg_y(n);
  for (const Harmonic& hg : g.harmonics()) {
    if (!hg.has_dy()) throw Error(ErrorKind::InvalidArgument, "advect needs y-derivatives of G");
    const cplx ik(0.0, grid.wavenumber(hg.m));
    for (std::size_t i = 0; i < n; ++i) {
      dxg_x[i] = ik * hg.vx[i];
      dxg_y[i] = ik * hg.vy[i];
    }
    for (const Harmonic& hf : f.harmonics()) {
      const int a = hf.m, b = hg.m;
      out.at(a + b, false);
      Harmonic* d = &out.at(std::abs(a - b), false);
      // Inserting the difference harmonic may have moved the sum one.
      Harmonic* sp = &out.at(a + b, false);
      accumulate_product(sp->vx, &d->vx, a, b, hf.vx, dxg_x);
      accumulate_product(sp->vx, &d->vx, a, b, hf.vy, hg.dvx);
      accumulate_product(sp->vy, &d->vy, a, b, hf.vx, dxg_y);
      accumulate_product(sp->vy, &d->vy, a, b, hf.vy, hg.dvy);
    }
  }
  if (out.find(0)) {
    Harmonic& h0 = out.at(0, false);
    for (auto& z : h0.vx) z = z.real();
    for (auto& z : h0.vy) z = z.real();
  }
  return out;
}

double divergence_l2(const ChannelField& f) {
  if (f.empty()) return 0.0;
  const Grid& grid = f.grid();
  double total = 0.0;
  for (const Harmonic& h : f.harmonics()) {
    if (!h.has_dy()) throw Error(ErrorKind::InvalidArgument, "divergence needs y-derivatives");
    const cplx ik(0.0, grid.wavenumber(h.m));
    double s = 0.0;
    for (std::size_t i = 0; i < grid.ny(); ++i) s += grid.wy[i] * std::norm(ik * h.vx[i] + h.dvy[i]);
    total += harmonic_weight(grid, h.m) * s;
  }
  return std::sqrt(total);
}

double lp_norm(const ChannelField& f, double p) {
  if (f.empty()) return 0.0;
  const Grid& grid = f.grid();
  const auto xs = grid.x_points();
  const double wx = grid.length_x / grid.nx;
  // Phase table per harmonic and x sample.
  std::vector<std::vector<cplx>> phase;
  for (const Harmonic& h : f.harmonics()) {
    std::vector<cplx> row(grid.nx);
    for (int ix = 0; ix < grid.nx; ++ix) row[ix] = std::polar(1.0, grid.wavenumber(h.m) * xs[ix]);
    phase.push_back(std::move(row));
  }
  double total = 0.0;
  for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
    double row_sum = 0.0;
    for (int ix = 0; ix < grid.nx; ++ix) {
      double vx = 0.0, vy = 0.0;
      for (std::size_t k = 0; k < f.harmonics().size(); ++k) {
        const Harmonic& h = f.harmonics()[k];
        vx += (h.vx[iy] * phase[k][ix]).real();
        vy += (h.vy[iy] * phase[k][ix]).real();
      }
      row_sum += std::pow(std::hypot(vx, vy), p);
    }
    total += grid.wy[iy] * wx * row_sum;
  }
  return std::pow(total, 1.0 / p);
}

GridField GridField::zeros(std::shared_ptr<const Grid> grid) {
  GridField g;
  g.values.assign(2 * static_cast<std::size_t>(grid->nx) * grid->ny(), 0.0);
  g.grid = std::move(grid);
  return g;
}

double& GridField::at(int comp, int ix, std::size_t iy) {
  return values[(static_cast<std::size_t>(comp) * grid->nx + ix) * grid->ny() + iy];
}

double GridField::at(int comp, int ix, std::size_t iy) const {
  return values[(static_cast<std::size_t>(comp) * grid->nx + ix) * grid->ny() + iy];
}

GridField sample(const ChannelField& f) {
  GridField g = GridField::zeros(f.grid_ptr());
  const auto xs = f.grid().x_points();
  for (int ix = 0; ix < f.grid().nx; ++ix) {
    for (std::size_t iy = 0; iy < f.grid().ny(); ++iy) {
      const auto [vx, vy] = f.value(xs[ix], iy);
      g.at(0, ix, iy) = vx;
      g.at(1, ix, iy) = vy;
    }
  }
  return g;
}

ChannelField analyze(const GridField& g) {
  const Grid& grid = *g.grid;
  ChannelField out(g.grid);
  const auto xs = grid.x_points();
  for (int m = 0; m < grid.nx / 2; ++m) {
    Harmonic& h = out.at(m, false);
    const double norm = (m == 0 ? 1.0 : 2.0) / grid.nx;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const cplx e = std::polar(norm, -grid.wavenumber(m) * xs[ix]);
      for (std::size_t iy = 0; iy < grid.ny(); ++iy) {
        h.vx[iy] += g.at(0, ix, iy) * e;
        h.vy[iy] += g.at(1, ix, iy) * e;
      }
    }
    if (m == 0) {
      for (auto& z : h.vx) z = z.real();
      for (auto& z : h.vy) z = z.real();
    }
  }
  return out;
}

}  // namespace mhdp
