#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "specdecay/exponent.hpp"
#include "specdecay/heat_flow.hpp"
#include "specdecay/littlewood_paley.hpp"
#include "specdecay/nse_sim.hpp"

namespace specdecay {

enum class RateVerdict { two_sided, upper_only, lower_only, no_algebraic_rate };

const char* to_string(RateVerdict v);

/// The three names a decay exponent goes by.
struct ConventionRecord {
  double sigma = 0.0;            // ||u(t)||^2 ~ (1+t)^{-sigma}
  double alpha_energy = 0.0;     // = sigma
  double alpha_amplitude = 0.0;  // = sigma / 2

  static ConventionRecord of(DecayExponent e) { return {e.sigma(), e.energy_alpha(), e.amplitude_alpha()}; }
};

struct FitOptions {
  double ratio_cap = 10.0;    // C_upper / c_lower
  double residual_cap = 0.1;  // log-space flatness of the compensated curve
  double drift_cap = 0.2;     // relative change between early and late half slopes
  double min_sigma = 0.01;    // below this the fit is indistinguishable from no decay
  std::optional<double> claimed_sigma;  // compensate at this exponent instead of the fit
};

struct DecayCertificate {
  double sigma_hat = 0.0;   // -slope of log E against log(1+t)
  double sigma_used = 0.0;  // exponent used for the constants
  double c_lower = 0.0, C_upper = 0.0;  // inf / sup of (1+t)^sigma_used E(t)
  double residual = 0.0;    // max |log comp - mean log comp|
  double slope_early = 0.0, slope_late = 0.0;
  double drift = 0.0;
  double t1 = 0.0, t2 = 0.0;
  std::size_t samples = 0;
  bool positive = true;
  RateVerdict verdict = RateVerdict::no_algebraic_rate;
  ConventionRecord convention;

  DecayExponent exponent() const { return DecayExponent::squared(sigma_hat); }
};

/// Fits the squared L^2 norm of a decay profile over [t1, t2].
DecayCertificate fit_rate(const DecayProfile& p, std::pair<double, double> window, const FitOptions& opt = {});

/// Generic form on (t, E) samples; E is the quantity expected to decay like
/// (1+t)^{-sigma}. Needs a decade of samples, otherwise WindowTooShort.
DecayCertificate fit_rate(const std::vector<double>& t, const std::vector<double>& energy,
                          std::pair<double, double> window, const FitOptions& opt = {});

// ---------------------------------------------------------------------------

struct ConditionVerdict {
  bool holds = false;
  double exponent = 0.0;  // fitted canonical sigma for (i) and (ii); 0 for (iii)
  double c = 0.0, C = 0.0;
  std::string detail;
};

struct EquivalenceRow {
  double sigma = 0.0;
  ConditionVerdict heat;        // two-sided heat decay at rate sigma
  ConditionVerdict mass;        // rho^{-2 sigma} mass bounded above and below
  ConditionVerdict membership;  // Besov plus script A membership at index sigma
  bool agree = false;
};

struct EquivalenceOptions {
  std::pair<double, double> time_window{1e2, 1e8};
  int time_per_decade = 20;
  double exponent_tol = 0.05;
  int stride = 1;
  BlockMode mode = BlockMode::sharp;
  FitOptions fit;
};

struct EquivalenceReport {
  DecayCertificate fit;  // unclaimed fit of the heat flow energy
  std::vector<EquivalenceRow> rows;  // first row at sigma_hat, then the grid
  std::vector<double> rho_ladder;
  bool agree = false;
  std::string caveat;
};

/// rho_lo .. rho_hi, per_decade log-spaced points.
std::vector<double> rho_ladder(double rho_lo = 1e-8, double rho_hi = 1e-1, int per_decade = 4);

/// Evaluates the three equivalent conditions at the fitted exponent and every
/// sigma in the grid (canonical convention). The ladder must span five decades.
EquivalenceReport equivalence_report(const RadialProfile& u0, const std::vector<double>& sigma_grid,
                                     const std::vector<double>& rho_ladder, const EquivalenceOptions& opt = {});

// ---------------------------------------------------------------------------

struct InverseWiegnerReport {
  DecayCertificate u, v;  // squared norms of the solution and the heat companion
  double sigma_gap = 0.0;
  double ratio_spread = 0.0;  // max / min of ||u|| / ||v|| over the window
  bool exact = false;          // u == v on every sample up to round-off
  bool passes = false;
  std::string note;
};

/// Same-rate check between the NSE solution and its heat companion.
InverseWiegnerReport inverse_wiegner_check(const SimTrace& sim,
                                           std::optional<std::pair<double, double>> window = std::nullopt,
                                           double tol = 0.05);

// ---------------------------------------------------------------------------

nlohmann::json to_json(const DecayCertificate& c);
nlohmann::json to_json(const EquivalenceReport& r);
nlohmann::json to_json(const InverseWiegnerReport& r);

/// Aligned-column text for humans.
void write_text(std::ostream& out, const DecayCertificate& c);
void write_text(std::ostream& out, const EquivalenceReport& r);

}  // namespace specdecay
