#include <cmath>

#include <omp.h>

#include "kernels_detail.hpp"
#include "specdecay/kernels.hpp"

namespace specdecay::kernels {

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

int dyadic_index(double k2) {
  // 2^j <= |k| < 2^{j+1}  <=>  4^j <= k2 < 4^{j+1}
  int j = static_cast<int>(std::floor(0.5 * std::log2(k2)));
  while (std::ldexp(1.0, 2 * j) > k2) --j;
  while (std::ldexp(1.0, 2 * (j + 1)) <= k2) ++j;
  return j;
}

namespace {

// Rows are the lattice lines along the last axis; row r covers points
// [r*N, (r+1)*N). The fixed row partition makes reductions deterministic.
struct RowGeometry {
  const Grid& grid;
  const std::vector<double>& ak;
  int n;
  std::size_t rows;

  explicit RowGeometry(const Grid& g) : grid(g), ak(g.axis_wavenumbers()), n(g.resolution()), rows(g.points() / g.resolution()) {}

  // Squared wavenumber of everything but the last axis, plus the leading components.
  double prefix(std::size_t r, double* k) const {
    if (grid.dim() == 2) {
      k[0] = ak[r];
      return k[0] * k[0];
    }
    k[0] = ak[r / n];
    k[1] = ak[r % n];
    return k[0] * k[0] + k[1] * k[1];
  }
};

}  // namespace

namespace omp {

double weighted_energy(const Grid& grid, std::span<const cplx> coeffs, const SpectralWeight& w) {
  const RowGeometry geo(grid);
  const int dim = grid.dim();
  const double lo2 = w.r_lo * w.r_lo, hi2 = w.r_hi * w.r_hi;
  std::vector<double> partial(geo.rows, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < geo.rows; ++r) {
    double k[3] = {0.0, 0.0, 0.0};
    const double head = geo.prefix(r, k);
    double s = 0.0;
    for (int i = 0; i < geo.n; ++i) {
      const double kl = geo.ak[i];
      const double k2 = dim == 2 ? k[0] * k[0] + kl * kl : head + kl * kl;
      if (k2 < lo2 || k2 >= hi2 || k2 == 0.0) continue;
      const std::size_t p = r * geo.n + i;
      double e = 0.0;
      for (int c = 0; c < dim; ++c) e += std::norm(coeffs[p * dim + c]);
      s += detail::weight_value(k2, w) * e;
    }
    partial[r] = s;
  }
  return pairwise_sum(partial) * grid.cell_measure();
}

std::vector<double> shell_energies(const Grid& grid, std::span<const cplx> coeffs, int j_min, int j_max) {
  const RowGeometry geo(grid);
  const int dim = grid.dim();
  const std::size_t nb = static_cast<std::size_t>(j_max - j_min + 3);
  std::vector<double> partial(geo.rows * nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < geo.rows; ++r) {
    double k[3] = {0.0, 0.0, 0.0};
    const double head = geo.prefix(r, k);
    double* bins = partial.data() + r * nb;
    for (int i = 0; i < geo.n; ++i) {
      const double kl = geo.ak[i];
      const double k2 = dim == 2 ? k[0] * k[0] + kl * kl : head + kl * kl;
      if (k2 == 0.0) continue;
      const std::size_t p = r * geo.n + i;
      double e = 0.0;
      for (int c = 0; c < dim; ++c) e += std::norm(coeffs[p * dim + c]);
      bins[detail::bin_of(k2, j_min, j_max)] += e;
    }
  }
  std::vector<double> out(nb);
  std::vector<double> column(geo.rows);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t r = 0; r < geo.rows; ++r) column[r] = partial[r * nb + b];
    out[b] = pairwise_sum(column) * grid.cell_measure();
  }
  return out;
}

std::vector<cplx> leray_project(const Grid& grid, std::span<const cplx> coeffs) {
  const RowGeometry geo(grid);
  const int dim = grid.dim();
  std::vector<cplx> out(coeffs.begin(), coeffs.end());
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < geo.rows; ++r) {
    double k[3] = {0.0, 0.0, 0.0};
    geo.prefix(r, k);
    for (int i = 0; i < geo.n; ++i) {
      k[dim - 1] = geo.ak[i];
      detail::project_point(k, out.data() + (r * geo.n + i) * dim, dim);
    }
  }
  return out;
}

std::vector<cplx> heat_multiply(const Grid& grid, std::span<const cplx> coeffs, double t) {
  const RowGeometry geo(grid);
  const int dim = grid.dim();
  std::vector<cplx> out(coeffs.begin(), coeffs.end());
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < geo.rows; ++r) {
    double k[3] = {0.0, 0.0, 0.0};
    const double head = geo.prefix(r, k);
    for (int i = 0; i < geo.n; ++i) {
      const double kl = geo.ak[i];
      const double k2 = dim == 2 ? k[0] * k[0] + kl * kl : head + kl * kl;
      const double f = std::exp(-t * k2);
      for (int c = 0; c < dim; ++c) out[(r * geo.n + i) * dim + c] *= f;
    }
  }
  return out;
}

}  // namespace omp
}  // namespace specdecay::kernels
