#pragma once

#include <cmath>

#include "specdecay/kernels.hpp"

namespace specdecay::kernels::detail {

inline double weight_value(double k2, const SpectralWeight& w) {
  double v = 1.0;
  for (int i = 0; i < w.power; ++i) v *= k2;
  if (w.heat_time != 0.0) v *= std::exp(-2.0 * w.heat_time * k2);
  return v;
}

// Bin layout shared with shell_energies: [0, nbins) dyadic, nbins below, nbins+1 above.
inline std::size_t bin_of(double k2, int j_min, int j_max) {
  const int j = dyadic_index(k2);
  const int nbins = j_max - j_min + 1;
  if (j < j_min) return nbins;
  if (j > j_max) return nbins + 1;
  return static_cast<std::size_t>(j - j_min);
}

// c <- c - k (k.c) / |k|^2
inline void project_point(const double* k, cplx* c, int dim) {
  double k2 = 0.0;
  cplx dot = 0.0;
  for (int d = 0; d < dim; ++d) {
    k2 += k[d] * k[d];
    dot += k[d] * c[d];
  }
  if (k2 == 0.0) return;
  const cplx s = dot / k2;
  for (int d = 0; d < dim; ++d) c[d] -= k[d] * s;
}

}  // namespace specdecay::kernels::detail
