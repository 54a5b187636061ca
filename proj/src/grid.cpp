#include "specdecay/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace specdecay {

Grid::Grid(int dim, double length, int resolution) : dim_(dim), length_(length), n_(resolution) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("Grid: dim must be 2 or 3");
  if (!(length > 0.0) || !std::isfinite(length)) throw std::invalid_argument("Grid: box length must be positive");
  if (resolution < 16 || (resolution & (resolution - 1)) != 0)
    throw std::invalid_argument("Grid: resolution must be a power of two >= 16, got " + std::to_string(resolution));
  points_ = 1;
  for (int d = 0; d < dim_; ++d) points_ *= static_cast<std::size_t>(n_);
  axis_k_.resize(n_);
  for (int i = 0; i < n_; ++i) axis_k_[i] = k0() * frequency_index(i);
}

double Grid::k0() const { return 2.0 * std::numbers::pi / length_; }

double Grid::cell_measure() const { return std::pow(k0(), dim_); }

std::array<int, 3> Grid::multi_index(std::size_t p) const {
  std::array<int, 3> m{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    m[d] = frequency_index(static_cast<int>(p % n_));
    p /= n_;
  }
  return m;
}

std::size_t Grid::flat_index(const std::array<int, 3>& m) const {
  std::size_t p = 0;
  for (int d = 0; d < dim_; ++d) p = p * n_ + axis_index(m[d]);
  return p;
}

std::size_t Grid::mirror(std::size_t p) const {
  auto m = multi_index(p);
  for (int d = 0; d < dim_; ++d) m[d] = -m[d];
  return flat_index(m);
}

std::array<double, 3> Grid::wavevector(std::size_t p) const {
  const auto m = multi_index(p);
  return {k0() * m[0], k0() * m[1], dim_ == 3 ? k0() * m[2] : 0.0};
}

double Grid::wavenumber_sq(std::size_t p) const {
  const auto k = wavevector(p);
  return k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
}

bool Grid::is_nyquist(std::size_t p) const {
  const auto m = multi_index(p);
  for (int d = 0; d < dim_; ++d)
    if (m[d] == -n_ / 2) return true;
  return false;
}

GridField::GridField(const Grid& grid) : grid_(grid), coeffs_(grid.points() * grid.dim()) {}

GridField::GridField(const Grid& grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.points() * grid_.dim())
    throw std::invalid_argument("GridField: coefficient count does not match grid");
  for (int c = 0; c < grid_.dim(); ++c) coeffs_[c] = 0.0;
}

double hermitian_defect(const GridField& f) {
  const Grid& g = f.grid();
  double worst = 0.0, scale = 0.0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto a = f.at(p);
    const auto b = f.at(g.mirror(p));
    for (int c = 0; c < g.dim(); ++c) {
      worst = std::max(worst, std::abs(b[c] - std::conj(a[c])));
      scale = std::max(scale, std::abs(a[c]));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

double divergence_defect(const GridField& f) {
  const Grid& g = f.grid();
  double worst = 0.0;
  for (std::size_t p = 1; p < g.points(); ++p) {
    const auto k = g.wavevector(p);
    const auto c = f.at(p);
    cplx dot = 0.0;
    double mag2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      dot += k[d] * c[d];
      mag2 += std::norm(c[d]);
    }
    if (mag2 == 0.0) continue;
    worst = std::max(worst, std::abs(dot) / (std::sqrt(mag2) * std::sqrt(g.wavenumber_sq(p))));
  }
  return worst;
}

bool is_divergence_free(const GridField& f, double tol) { return divergence_defect(f) <= tol; }

GridField scaled(const GridField& f, double lambda) {
  std::vector<cplx> out(f.coeffs().begin(), f.coeffs().end());
  for (auto& c : out) c *= lambda;
  return GridField(f.grid(), std::move(out));
}

GridField difference(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("difference: grids differ");
  std::vector<cplx> out(a.coeffs().begin(), a.coeffs().end());
  const auto bc = b.coeffs();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bc[i];
  return GridField(a.grid(), std::move(out));
}

}  // namespace specdecay
