#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace specdecay {

using cplx = std::complex<double>;

/// Periodic box [0, L)^n sampled with N points per axis. Lattice
/// frequencies are k0 * m with integer components m in [-N/2, N/2).
class Grid {
 public:
  Grid(int dim, double length, int resolution);

  int dim() const { return dim_; }
  double length() const { return length_; }
  int resolution() const { return n_; }
  double k0() const;
  /// Measure of one lattice cell in frequency space, k0^n.
  double cell_measure() const;
  std::size_t points() const { return points_; }
  /// Largest |m| kept on each axis (Nyquist excluded).
  int max_index() const { return n_ / 2 - 1; }

  /// Signed integer frequency for axis index i in [0, N).
  int frequency_index(int i) const { return i < n_ / 2 ? i : i - n_; }
  /// Axis index in [0, N) for a signed integer frequency.
  int axis_index(int m) const { return ((m % n_) + n_) % n_; }

  std::array<int, 3> multi_index(std::size_t p) const;
  std::size_t flat_index(const std::array<int, 3>& m) const;
  std::size_t mirror(std::size_t p) const;
  std::array<double, 3> wavevector(std::size_t p) const;
  double wavenumber_sq(std::size_t p) const;
  /// True when some component sits at -N/2.
  bool is_nyquist(std::size_t p) const;

  /// k0 * frequency_index(i) for every axis index.
  const std::vector<double>& axis_wavenumbers() const { return axis_k_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.length_ == b.length_ && a.n_ == b.n_;
  }

 private:
  int dim_;
  double length_;
  int n_;
  std::size_t points_;
  std::vector<double> axis_k_;
};

/// Fourier coefficients of a real vector field on a Grid.
///
/// coeff(k) samples the continuous transform with the normalization
/// ||u||^2 = int |u^(xi)|^2 dxi, so Plancherel on the lattice reads
/// ||u||^2 = k0^n * sum_k |coeff(k)|^2. Storage is point-major with the
/// dim components of one lattice point contiguous. The zero mode is forced
/// to zero on construction (mean-zero convention).
class GridField {
 public:
  explicit GridField(const Grid& grid);
  GridField(const Grid& grid, std::vector<cplx> coeffs);

  const Grid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<const cplx> at(std::size_t p) const {
    return std::span<const cplx>(coeffs_).subspan(p * grid_.dim(), grid_.dim());
  }
  /// Moves the coefficient storage out (for building a derived field).
  std::vector<cplx> release() && { return std::move(coeffs_); }

 private:
  Grid grid_;
  std::vector<cplx> coeffs_;
};

/// max_k |coeff(-k) - conj(coeff(k))| / max_k |coeff(k)| (0 for the zero field).
double hermitian_defect(const GridField& f);
/// max over k != 0 of |k . coeff(k)| / (|k| |coeff(k)|).
double divergence_defect(const GridField& f);
bool is_divergence_free(const GridField& f, double tol = 1e-12);

GridField scaled(const GridField& f, double lambda);
GridField difference(const GridField& a, const GridField& b);

}  // namespace specdecay
