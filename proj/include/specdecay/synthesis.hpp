#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "specdecay/littlewood_paley.hpp"
#include "specdecay/spectral_core.hpp"

namespace specdecay {

RadialProfile make_zero_profile(int n);

/// A(r) = r^{2 kappa} on r <= cutoff. Throws InfiniteEnergy when kappa <= -n/2.
RadialProfile make_power_law(int n, double kappa, double cutoff);

/// A(r) = r^{-n} (log r)^{-2} on r <= 1/2 (natural log).
RadialProfile make_log_counterexample(int n);

/// A(r) = r^2 e^{-r^2}; for n = 2, ||u0||^2 = pi and ||e^{t Delta} u0||^2 = pi (1+2t)^{-2}.
RadialProfile make_gaussian_swirl(int n);

/// A(r) = r^{2 kappa} on [r_lo, r_hi], zero elsewhere.
RadialProfile make_band_limited(int n, double r_lo, double r_hi, double kappa = 0.0);

/// Log-log interpolation of positive samples (r_i, A_i), zero beyond the last
/// node. Below the first node the first segment's power law is continued;
/// its tail is reported with an error equal to its value.
RadialProfile make_tabulated(int n, std::vector<double> r, std::vector<double> amplitude);

/// Inverse of to_json for every kind above plus heat-evolved and scaled
/// descriptors. Throws ConfigInvalid on unknown kinds or bad parameters.
RadialProfile profile_from_json(const nlohmann::json& d);

// ---------------------------------------------------------------------------

/// How a replacement shell w_j on block j is scaled.
///   unit:    ||w_j|| = eps 2^{2 alpha j}, so c_n = 1.
///   literal: w_j^ = eps 2^{(2 alpha - n/2) j} e(xi) 1_shell, so
///            c_n^2 = 2 |S^{n-1}| (2^n - 1) / n^2 (3 pi for n = 2).
enum class ShellNormalization { unit, literal };

double shell_constant(int n, ShellNormalization mode);

struct PerturbationRow {
  int j = 0;
  bool kept = true;
  double source_ratio = 0.0;    // 2^{-2 alpha j} ||Delta_j u0||
  double w_ratio = 0.0;         // 2^{-2 alpha j} ||Delta_j w||
  double distance_ratio = 0.0;  // 2^{-2 alpha j} ||Delta_j (u0 - w)||
};

struct PerturbationReport {
  double alpha = 0.0;
  double epsilon = 0.0;
  int j0 = 0;
  ShellNormalization normalization = ShellNormalization::unit;
  double c_n = 1.0;
  /// Lower-bound constant actually guaranteed: kept blocks give 1, shells give c_n.
  double c_lower = 1.0;
  std::vector<PerturbationRow> rows;  // j <= j0 inside the report window
  bool lower_bound_holds = false;     // w_ratio >= c_lower eps (1 - 1e-10)
  bool distance_holds = false;        // distance_ratio <= 2 eps
  double min_w_ratio = 0.0;
  double max_distance_ratio = 0.0;
};

struct RadialPerturbation {
  RadialProfile w;
  PerturbationReport report;
};

struct GridPerturbation {
  GridField w;
  PerturbationReport report;
};

/// w_j = Delta_j u0 for j > j0 or when 2^{-2 alpha j} ||Delta_j u0|| >= eps
/// (ties keep), otherwise a swirl shell. The radial version decides every
/// block down to 2^{-60} and reports rows for j in [report_j_min, j0].
RadialPerturbation make_v_alpha_perturbation(const RadialProfile& u0, double alpha, double epsilon, int j0,
                                             int report_j_min = -40,
                                             ShellNormalization mode = ShellNormalization::unit);
/// Grid version: perturbs every lattice block j <= j0 and reports the
/// resolvable ones (2^j >= 2 k0).
GridPerturbation make_v_alpha_perturbation(const GridField& u0, double alpha, double epsilon, int j0,
                                           ShellNormalization mode = ShellNormalization::unit);

// ---------------------------------------------------------------------------

enum class RandomMode {
  random_phase,  // |coeff(k)|^2 = envelope(|k|) exactly, random direction and phase
  gaussian,      // complex Gaussian coefficients scaled by sqrt(envelope(|k|))
};

/// Seeded (mt19937_64) Gaussian draw, Hermitian-symmetrized, Leray-projected,
/// then shaped by the envelope. Nyquist modes are zero.
GridField make_random_div_free(const Grid& grid, std::uint64_t seed, const std::function<double(double)>& envelope,
                               RandomMode mode = RandomMode::random_phase);

}  // namespace specdecay
