#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "specdecay/spectral_core.hpp"

namespace specdecay {

enum class BlockMode { sharp, smooth };

/// Block energies ||Delta_j u||^2 over a dyadic window [j_min, j_max].
struct DyadicSpectrum {
  int j_min = 0;
  int j_max = -1;
  std::vector<double> block_energy;  // index j - j_min
  double mass_below = 0.0;           // |xi| < 2^{j_min}
  double mass_above = 0.0;           // |xi| >= 2^{j_max + 1}
  BlockMode mode = BlockMode::sharp;

  static DyadicSpectrum from_energies(int j_min, std::vector<double> energies, double below = 0.0,
                                      double above = 0.0);

  int size() const { return static_cast<int>(block_energy.size()); }
  bool contains(int j) const { return j >= j_min && j <= j_max; }
  double energy(int j) const { return contains(j) ? block_energy[j - j_min] : 0.0; }
  double norm(int j) const;
  double window_mass() const;
  double truncated_mass() const { return mass_below + mass_above; }
  double total_mass() const { return window_mass() + truncated_mass(); }
};

/// chi: 1 on r <= 3/4, 0 on r >= 4/3, cos^2 transition in between.
double smooth_cutoff(double r);
/// phi(r / 2^j) = chi(r / 2^{j+1}) - chi(r / 2^j); supported in 2^j [3/4, 8/3].
double smooth_block_weight(double r, int j);

/// Sharp mode integrates |u^|^2 over 2^j <= |xi| < 2^{j+1}; smooth mode
/// weights by phi_j^2. Grid input requires 2^{j_min} >= 2 k0 and a block
/// j_max that starts below the largest lattice wavenumber, otherwise
/// WindowUnresolvable.
DyadicSpectrum dyadic_blocks(const RadialProfile& u0, int j_min, int j_max, BlockMode mode = BlockMode::sharp);
DyadicSpectrum dyadic_blocks(const GridField& u0, int j_min, int j_max, BlockMode mode = BlockMode::sharp);
DyadicSpectrum dyadic_blocks(const Field& u0, int j_min, int j_max, BlockMode mode = BlockMode::sharp);

// ---------------------------------------------------------------------------

/// sup_j 2^{-alpha j} ||Delta_j u|| over the window. `alpha` is the index of
/// the unsquared block norm, i.e. the canonical sigma.
struct BesovReport {
  double alpha = 0.0;
  double seminorm = 0.0;
  int arg_sup = 0;
  /// Sup sits strictly at j_min: the window cuts off a growing ratio.
  bool diverges = false;
  std::vector<double> ratios;
};

BesovReport besov_seminorm(const DyadicSpectrum& s, double alpha);

struct StrideRow {
  int k = 0;
  int j_lo = 0, j_hi = 0;  // inclusive
  double best_ratio = 0.0;
  int best_j = 0;
};

struct MembershipVerdict {
  double alpha = 0.0;
  double norm = 0.0;  // ||u||, used to normalize c and delta

  bool in_besov = false;
  double C = 0.0;

  bool in_script_A = false;
  double c = 0.0;
  int M = 0;
  std::vector<StrideRow> strides;

  bool in_V_alpha = false;
  double delta = 0.0;
  int j0 = 0;

  /// Inf over the window sits strictly at its deep end.
  bool vanishing = false;
  std::vector<double> ratios;
};

/// Membership tolerance applied to c / ||u|| and delta / ||u||.
inline constexpr double kMembershipTol = 1e-12;

/// Lower bound along strides {-(k+1)M, ..., -kM-1}: c = min_k max_{j in stride}
/// 2^{-alpha j} ||Delta_j u||. Needs at least five strides inside the window.
MembershipVerdict script_A_membership(const DyadicSpectrum& s, double alpha, int M);

/// sup_{j <= j0} 2^{-2 alpha j} ||Delta_j w|| + (sum_{j > j0} ||Delta_j w||^2)^{1/2};
/// the second sum includes the mass above the window.
double equivalent_norm(const DyadicSpectrum& s, double alpha, int j0);

/// Searches j0 >= j_min + 4 for the largest delta = inf_{j_min <= j <= j0}
/// 2^{-2 alpha j} ||Delta_j u||. The Besov fields report ambient membership
/// at index 2 alpha.
MembershipVerdict V_alpha_membership(const DyadicSpectrum& s, double alpha);

/// CSV columns j, block_energy[, ratio_for_alpha].
void write_csv(std::ostream& out, const DyadicSpectrum& s, std::optional<double> alpha = std::nullopt);

}  // namespace specdecay
