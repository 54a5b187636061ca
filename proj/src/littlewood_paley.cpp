#include "specdecay/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "specdecay/errors.hpp"

namespace specdecay {

namespace {

constexpr double kFlatTol = 1e-9;

double pow2(int j) { return std::ldexp(1.0, j); }

}  // namespace

DyadicSpectrum DyadicSpectrum::from_energies(int j_min, std::vector<double> energies, double below, double above) {
  DyadicSpectrum s;
  s.j_min = j_min;
  s.j_max = j_min + static_cast<int>(energies.size()) - 1;
  s.block_energy = std::move(energies);
  s.mass_below = below;
  s.mass_above = above;
  for (double e : s.block_energy)
    if (!(e >= 0.0)) throw std::invalid_argument("DyadicSpectrum: block energies must be nonnegative");
  return s;
}

double DyadicSpectrum::norm(int j) const { return std::sqrt(energy(j)); }

double DyadicSpectrum::window_mass() const { return kernels::pairwise_sum(block_energy); }

double smooth_cutoff(double r) {
  constexpr double a = 0.75, b = 4.0 / 3.0;
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (r - a) / (b - a));
  return c * c;
}

double smooth_block_weight(double r, int j) {
  const double x = r / pow2(j);
  return smooth_cutoff(0.5 * x) - smooth_cutoff(x);
}

// ---------------------------------------------------------------------------

DyadicSpectrum dyadic_blocks(const RadialProfile& u0, int j_min, int j_max, BlockMode mode) {
  if (j_min > j_max) throw std::invalid_argument("dyadic_blocks: empty window");
  DyadicSpectrum s;
  s.j_min = j_min;
  s.j_max = j_max;
  s.mode = mode;
  s.block_energy.resize(j_max - j_min + 1);
  for (int j = j_min; j <= j_max; ++j) {
    double e = 0.0;
    if (mode == BlockMode::sharp) {
      e = radial_integral(u0, pow2(j), pow2(j + 1)).value;
    } else {
      const double base = pow2(j);
      const double cuts[] = {0.75 * base, base * 4.0 / 3.0, 1.5 * base, base * 8.0 / 3.0};
      RadialWeight w;
      w.extra = [j](double r) {
        const double phi = smooth_block_weight(r, j);
        return phi * phi;
      };
      for (int i = 0; i < 3; ++i) e += radial_integral(u0, cuts[i], cuts[i + 1], w).value;
    }
    s.block_energy[j - j_min] = e;
  }
  s.mass_below = radial_integral(u0, 0.0, pow2(j_min)).value;
  s.mass_above = radial_integral(u0, pow2(j_max + 1), std::numeric_limits<double>::infinity()).value;
  return s;
}

DyadicSpectrum dyadic_blocks(const GridField& u0, int j_min, int j_max, BlockMode mode) {
  if (j_min > j_max) throw std::invalid_argument("dyadic_blocks: empty window");
  const Grid& g = u0.grid();
  const double kmax = g.k0() * g.max_index();
  if (pow2(j_min) < 2.0 * g.k0() || pow2(j_max) > kmax) {
    std::ostringstream msg;
    msg << "dyadic window [" << j_min << ", " << j_max << "] not resolved by the lattice (2 k0 = " << 2.0 * g.k0()
        << ", k_max = " << kmax << ")";
    throw WindowUnresolvable(msg.str());
  }
  const auto shells = kernels::omp::shell_energies(g, u0.coeffs(), j_min, j_max);
  const int nb = j_max - j_min + 1;
  DyadicSpectrum s;
  s.j_min = j_min;
  s.j_max = j_max;
  s.mode = mode;
  s.block_energy.assign(shells.begin(), shells.begin() + nb);
  s.mass_below = shells[nb];
  s.mass_above = shells[nb + 1];
  if (mode == BlockMode::sharp) return s;

  const std::size_t rows = g.points() / g.resolution();
  const int n = g.resolution();
  const int dim = g.dim();
  std::vector<double> partial(rows * nb, 0.0);
  const auto coeffs = u0.coeffs();
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < rows; ++r) {
    double* bins = partial.data() + r * nb;
    for (int i = 0; i < n; ++i) {
      const std::size_t p = r * n + i;
      const double k2 = g.wavenumber_sq(p);
      if (k2 == 0.0) continue;
      double e = 0.0;
      for (int c = 0; c < dim; ++c) e += std::norm(coeffs[p * dim + c]);
      const double k = std::sqrt(k2);
      const int m = kernels::dyadic_index(k2);
      for (int j = std::max(m - 1, j_min); j <= std::min(m + 1, j_max); ++j) {
        const double phi = smooth_block_weight(k, j);
        bins[j - j_min] += phi * phi * e;
      }
    }
  }
  std::vector<double> column(rows);
  for (int b = 0; b < nb; ++b) {
    for (std::size_t r = 0; r < rows; ++r) column[r] = partial[r * nb + b];
    s.block_energy[b] = kernels::pairwise_sum(column) * g.cell_measure();
  }
  return s;
}

DyadicSpectrum dyadic_blocks(const Field& u0, int j_min, int j_max, BlockMode mode) {
  return std::visit([&](const auto& f) { return dyadic_blocks(f, j_min, j_max, mode); }, u0);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> ratio_table(const DyadicSpectrum& s, double exponent) {
  std::vector<double> r(s.size());
  for (int j = s.j_min; j <= s.j_max; ++j) r[j - s.j_min] = std::exp2(-exponent * j) * s.norm(j);
  return r;
}

}  // namespace

BesovReport besov_seminorm(const DyadicSpectrum& s, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("besov_seminorm: alpha must be positive");
  BesovReport rep;
  rep.alpha = alpha;
  rep.ratios = ratio_table(s, alpha);
  if (rep.ratios.empty()) return rep;
  const auto it = std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.seminorm = *it;
  rep.arg_sup = s.j_min + static_cast<int>(it - rep.ratios.begin());
  if (rep.ratios.size() > 1 && rep.arg_sup == s.j_min) {
    const double rest = *std::max_element(rep.ratios.begin() + 1, rep.ratios.end());
    rep.diverges = rep.ratios[0] > (1.0 + kFlatTol) * rest;
  }
  return rep;
}

MembershipVerdict script_A_membership(const DyadicSpectrum& s, double alpha, int M) {
  if (!(alpha > 0.0)) throw std::invalid_argument("script_A_membership: alpha must be positive");
  if (M < 1) throw std::invalid_argument("script_A_membership: stride must be >= 1");
  MembershipVerdict v;
  v.alpha = alpha;
  v.M = M;
  v.norm = std::sqrt(s.total_mass());
  const BesovReport b = besov_seminorm(s, alpha);
  v.ratios = b.ratios;
  v.C = b.seminorm;
  v.in_besov = !b.diverges;

  for (int k = 0;; ++k) {
    const int lo = -(k + 1) * M, hi = -k * M - 1;
    if (lo < s.j_min) break;
    if (hi > s.j_max) continue;
    StrideRow row{k, lo, hi, 0.0, lo};
    for (int j = lo; j <= hi; ++j) {
      const double r = v.ratios[j - s.j_min];
      if (r > row.best_ratio) {
        row.best_ratio = r;
        row.best_j = j;
      }
    }
    v.strides.push_back(row);
  }
  if (v.strides.size() < 5)
    throw std::invalid_argument("script_A_membership: window covers fewer than five strides");

  v.c = std::numeric_limits<double>::infinity();
  double others = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.strides.size(); ++i) {
    v.c = std::min(v.c, v.strides[i].best_ratio);
    if (i + 1 < v.strides.size()) others = std::min(others, v.strides[i].best_ratio);
  }
  v.vanishing = v.strides.back().best_ratio < (1.0 - kFlatTol) * others;
  const double cn = v.norm > 0.0 ? v.c / v.norm : 0.0;
  v.in_script_A = v.in_besov && !v.vanishing && cn > kMembershipTol;
  return v;
}

double equivalent_norm(const DyadicSpectrum& s, double alpha, int j0) {
  if (!s.contains(j0)) throw std::invalid_argument("equivalent_norm: j0 outside the window");
  double sup = 0.0;
  for (int j = s.j_min; j <= j0; ++j) sup = std::max(sup, std::exp2(-2.0 * alpha * j) * s.norm(j));
  std::vector<double> high(s.block_energy.begin() + (j0 - s.j_min + 1), s.block_energy.end());
  high.push_back(s.mass_above);
  return sup + std::sqrt(kernels::pairwise_sum(high));
}

MembershipVerdict V_alpha_membership(const DyadicSpectrum& s, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("V_alpha_membership: alpha must be positive");
  MembershipVerdict v;
  v.alpha = alpha;
  v.norm = std::sqrt(s.total_mass());
  v.ratios = ratio_table(s, 2.0 * alpha);
  const BesovReport b = besov_seminorm(s, 2.0 * alpha);
  v.C = b.seminorm;
  v.in_besov = !b.diverges;
  if (s.size() < 5) throw std::invalid_argument("V_alpha_membership: window shorter than five blocks");

  // running inf from the deep end; keep the largest j0 attaining the best delta
  double inf = std::numeric_limits<double>::infinity();
  v.delta = -1.0;
  for (int j = s.j_min; j <= s.j_max; ++j) {
    inf = std::min(inf, v.ratios[j - s.j_min]);
    if (j >= s.j_min + 4 && inf >= v.delta) {
      v.delta = inf;
      v.j0 = j;
    }
  }
  double above = std::numeric_limits<double>::infinity();
  for (int j = s.j_min + 1; j <= v.j0; ++j) above = std::min(above, v.ratios[j - s.j_min]);
  v.vanishing = v.ratios[0] < (1.0 - kFlatTol) * above;
  const double dn = v.norm > 0.0 ? v.delta / v.norm : 0.0;
  v.in_V_alpha = !v.vanishing && dn > kMembershipTol;
  return v;
}

void write_csv(std::ostream& out, const DyadicSpectrum& s, std::optional<double> alpha) {
  out << "j,block_energy";
  if (alpha) out << ",ratio_for_alpha";
  out << '\n' << std::setprecision(17);
  for (int j = s.j_min; j <= s.j_max; ++j) {
    out << j << ',' << s.energy(j);
    if (alpha) out << ',' << std::exp2(-*alpha * j) * s.norm(j);
    out << '\n';
  }
}

}  // namespace specdecay
