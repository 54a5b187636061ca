#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specdecay/spectral_core.hpp"

namespace specdecay {

// Heat semigroup e^{t Delta} and the linear Stokes flow with forcing.

/// u^(t) = e^{-t |xi|^2} u0^. On a radial profile the root picks up e^{-t r^2},
/// so the amplitude picks up e^{-2 t r^2}; the descriptor accumulates heat_time.
RadialProfile heat_evolve(const RadialProfile& u0, double t);
GridField heat_evolve(const GridField& u0, double t);
Field heat_evolve(const Field& u0, double t);

/// Largest time at which a grid flow still approximates the whole-space flow.
double validity_horizon(const Grid& grid);

/// Separable forcing f(x, t) = phi(t) g(x) with g divergence-free.
struct ForcingSpec {
  std::string kind = "separable";
  std::function<double(double)> phi;
  std::optional<Field> g;  // empty means f == 0
  double alpha = 0.0;       // claimed index in ||f|| <= C_f (1+t)^{-alpha-1}
  double C_f = 0.0;
  double K_f = 0.0;         // claimed constant in ||f||_{L^n} <= K_f t^{-alpha-(n+2)/4}

  bool is_zero() const { return !g.has_value() || !phi; }
};

/// Gauss-Kronrod in s, split at t/2. Grid results cache Phi per |k|^2.
struct DuhamelResult {
  GridField field;
  double error_estimate = 0.0;  // sup over lattice of the quadrature error, times ||g||
};

struct RadialDuhamelResult {
  RadialProfile field;
  double error_estimate = 0.0;
};

/// Phi(t, lambda) = int_0^t e^{-(t-s) lambda} phi(s) ds, with the Kronrod
/// error estimate in `error`. Throws QuadratureDivergence when the integral
/// does not converge (e.g. phi not integrable at 0).
double duhamel_factor(const std::function<double(double)>& phi, double t, double lambda, double* error = nullptr,
                      int max_depth = 15);

DuhamelResult stokes_duhamel(const GridField& u0, const ForcingSpec& f, double t);
/// Requires u0 and g to be radial profiles of the same dimension.
RadialDuhamelResult stokes_duhamel(const RadialProfile& u0, const ForcingSpec& f, double t);

struct ForcingSample {
  double t = 0.0;
  double l2 = 0.0;
  double l2_bound = 0.0;
  std::optional<double> ln;  // only for n >= 3
  std::optional<double> ln_bound;
};

struct ForcingBoundReport {
  std::vector<ForcingSample> samples;
  /// min over samples of bound / value (infinite when f == 0); passing needs >= 1.
  double worst_margin = 0.0;
  bool passes = false;
  bool ln_checked = false;
};

/// ||f(t)||_{L^2} against C_f (1+t)^{-alpha-1} and, for n = 3 grid forcing,
/// the discrete ||f(t)||_{L^3} on the physical grid against K_f t^{-alpha-5/4}.
ForcingBoundReport forcing_bound_check(const ForcingSpec& f, const std::vector<double>& t_samples);

/// Discrete L^p norm of the physical field (inverse FFT, Lebesgue sum with
/// cell volume (L/N)^n). Approximate.
double physical_lp_norm(const GridField& f, double p);

// ---------------------------------------------------------------------------

struct SplittingSample {
  double t = 0.0;
  double energy = 0.0;       // ||e^{t Delta} u0||^2
  double derivative = 0.0;   // d/dt of the above, exact formula
  double g = 0.0;            // (1+t)^{-1/2}
  double lhs = 0.0;          // derivative + g^2 energy
  double rhs = 0.0;          // g^2 int_{|xi|<=g} e^{-2t|xi|^2} |u0^|^2
  double margin = 0.0;       // (rhs - lhs) / max(|lhs|, |rhs|), 0 when both vanish
  double compensated = 0.0;  // rhs (1+t)^{1+sigma} when sigma is given
};

struct SplittingReport {
  std::vector<SplittingSample> samples;
  double worst_margin = 0.0;
  bool inequality_holds = false;  // worst_margin >= -1e-10
  /// Largest relative gap between the exact derivative and a centered
  /// difference at three sample points.
  double fd_check = 0.0;
  std::optional<double> sigma;
  double comp_ratio = 0.0;  // sup/inf of compensated rhs over t in [10, 1e6] samples
  bool rhs_bounded = false;
};

inline constexpr double kSplittingTol = 1e-10;

SplittingReport fourier_splitting_check(const RadialProfile& u0, std::optional<double> sigma,
                                        const std::vector<double>& t_samples);

// ---------------------------------------------------------------------------

struct DecayProfile {
  std::vector<double> times;
  std::vector<double> l2, hdot1, hdot2;
  std::string backend = "radial";
  double horizon = 0.0;  // grid only; 0 for radial
  /// Grid samples within the last decade before the horizon, where the box
  /// starts to matter. Always false on the radial backend.
  std::vector<bool> horizon_flag;

  std::size_t size() const { return times.size(); }
  const std::vector<double>& series(int l) const;
};

std::vector<double> log_time_grid(double t_lo, double t_hi, int per_decade);

/// Samples ||D^l u(t)|| for l = 0, 1, 2 under the heat flow, or the Stokes
/// flow when forcing is given. Grid input beyond 0.1 / k0^2 throws HorizonExceeded.
DecayProfile decay_profile(const Field& u0, const std::vector<double>& times, const ForcingSpec* forcing = nullptr);

/// CSV columns t, l2, hdot1, hdot2, backend, horizon_flag.
void write_csv(std::ostream& out, const DecayProfile& p);

}  // namespace specdecay
