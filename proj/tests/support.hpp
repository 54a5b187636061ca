#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "specdecay/grid.hpp"

namespace testing {

// Hermitian, not divergence-free, Nyquist-free coefficients with a Gaussian
// envelope so that every lattice norm is finite and well conditioned.
inline specdecay::GridField random_field(const specdecay::Grid& g, unsigned seed, double width = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  const int d = g.dim();
  const double w = width > 0.0 ? width : 0.25 * g.k0() * g.resolution();
  std::vector<specdecay::cplx> c(g.points() * d);
  for (std::size_t p = 0; p < g.points(); ++p) {
    const std::size_t q = g.mirror(p);
    if (q < p || g.is_nyquist(p)) continue;
    const double env = std::exp(-g.wavenumber_sq(p) / (2.0 * w * w));
    for (int i = 0; i < d; ++i) {
      const specdecay::cplx z(n01(rng), q == p ? 0.0 : n01(rng));
      c[p * d + i] = env * z;
      c[q * d + i] = std::conj(env * z);
    }
  }
  return specdecay::GridField(g, std::move(c));
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
