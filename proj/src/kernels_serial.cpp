#include <cmath>

#include "kernels_detail.hpp"
#include "specdecay/kernels.hpp"

namespace specdecay::kernels::serial {

double weighted_energy(const Grid& grid, std::span<const cplx> coeffs, const SpectralWeight& w) {
  const int dim = grid.dim();
  const double lo2 = w.r_lo * w.r_lo, hi2 = w.r_hi * w.r_hi;
  double sum = 0.0;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto k = grid.wavevector(p);
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 < lo2 || k2 >= hi2 || k2 == 0.0) continue;
    double e = 0.0;
    for (int c = 0; c < dim; ++c) e += std::norm(coeffs[p * dim + c]);
    sum += detail::weight_value(k2, w) * e;
  }
  return sum * grid.cell_measure();
}

std::vector<double> shell_energies(const Grid& grid, std::span<const cplx> coeffs, int j_min, int j_max) {
  const int dim = grid.dim();
  const int nbins = j_max - j_min + 1;
  std::vector<double> out(nbins + 2, 0.0);
  for (std::size_t p = 1; p < grid.points(); ++p) {
    const double k2 = grid.wavenumber_sq(p);
    double e = 0.0;
    for (int c = 0; c < dim; ++c) e += std::norm(coeffs[p * dim + c]);
    out[detail::bin_of(k2, j_min, j_max)] += e;
  }
  for (auto& v : out) v *= grid.cell_measure();
  return out;
}

std::vector<cplx> leray_project(const Grid& grid, std::span<const cplx> coeffs) {
  const int dim = grid.dim();
  std::vector<cplx> out(coeffs.begin(), coeffs.end());
  for (std::size_t p = 1; p < grid.points(); ++p) {
    const auto k = grid.wavevector(p);
    detail::project_point(k.data(), out.data() + p * dim, dim);
  }
  return out;
}

std::vector<cplx> heat_multiply(const Grid& grid, std::span<const cplx> coeffs, double t) {
  const int dim = grid.dim();
  std::vector<cplx> out(coeffs.begin(), coeffs.end());
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const double f = std::exp(-t * grid.wavenumber_sq(p));
    for (int c = 0; c < dim; ++c) out[p * dim + c] *= f;
  }
  return out;
}

}  // namespace specdecay::kernels::serial
