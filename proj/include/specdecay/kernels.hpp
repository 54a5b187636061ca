#pragma once

#include <limits>
#include <span>
#include <vector>

#include "specdecay/grid.hpp"

// Data-parallel lattice kernels.
//
// Every kernel exists twice. kernels::serial holds plain single-accumulator
// loops kept as the reference for tests and benchmarks. kernels::omp holds
// the production versions: OpenMP over rows of the lattice, with one
// partial result per row combined by fixed-order pairwise summation, so the
// answer is bitwise identical for any thread count.
namespace specdecay::kernels {

/// Lattice weight |k|^{2 power} e^{-2 t |k|^2} restricted to r_lo <= |k| < r_hi.
struct SpectralWeight {
  int power = 0;
  double heat_time = 0.0;
  double r_lo = 0.0;
  double r_hi = std::numeric_limits<double>::infinity();
};

double pairwise_sum(std::span<const double> values);

namespace serial {
/// k0^n * sum_k w(k) |coeff(k)|^2.
double weighted_energy(const Grid& grid, std::span<const cplx> coeffs, const SpectralWeight& w);
/// Sharp dyadic shells 2^j <= |k| < 2^{j+1} for j in [j_min, j_max]; entry
/// j - j_min. Two extra trailing entries hold the mass below 2^{j_min}
/// and at or above 2^{j_max+1}.
std::vector<double> shell_energies(const Grid& grid, std::span<const cplx> coeffs, int j_min, int j_max);
std::vector<cplx> leray_project(const Grid& grid, std::span<const cplx> coeffs);
/// coeffs * e^{-t |k|^2}.
std::vector<cplx> heat_multiply(const Grid& grid, std::span<const cplx> coeffs, double t);
}  // namespace serial

namespace omp {
double weighted_energy(const Grid& grid, std::span<const cplx> coeffs, const SpectralWeight& w);
std::vector<double> shell_energies(const Grid& grid, std::span<const cplx> coeffs, int j_min, int j_max);
std::vector<cplx> leray_project(const Grid& grid, std::span<const cplx> coeffs);
std::vector<cplx> heat_multiply(const Grid& grid, std::span<const cplx> coeffs, double t);
}  // namespace omp

/// Dyadic index j with 2^j <= sqrt(k2) < 2^{j+1}, robust at exact powers of two.
int dyadic_index(double k2);

}  // namespace specdecay::kernels
