#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specdecay/heat_flow.hpp"
#include "specdecay/spectral_core.hpp"

namespace specdecay {

// 2D periodic pseudo-spectral Navier-Stokes in vorticity form,
//   w_t + u . grad w = Laplace w,   u^ = (i k_2, -i k_1) w^ / |k|^2,
// on the r2c half spectrum with a square 2/3 dealiasing mask.

enum class Integrator { if_rk4, imex_euler };

struct SimConfig {
  Grid grid{2, 200.0 * 3.14159265358979323846, 512};
  double dt = 0.05;          // initial step
  double dt_growth = 0.02;   // step grows to dt_growth * t; 0 keeps dt fixed
  double dt_max = 50.0;
  double t_end = 1000.0;
  double dealias = 2.0 / 3.0;
  double cfl = 0.5;          // dt <= cfl * (L/N) / max|u|
  Integrator integrator = Integrator::if_rk4;
  std::vector<double> record_times;  // empty: 20 per decade from min(1, t_end/10) to t_end
};

struct SimTrace {
  DecayProfile u;  // ||D^l u(t)||
  DecayProfile v;  // companion heat flow e^{t Delta} u0
  std::vector<double> theta_l2;     // ||u(t) - v(t)||
  std::vector<double> energy;       // ||u(t)||^2
  std::vector<double> dissipation;  // 2 int_0^t ||D u||^2 ds
  std::vector<double> skew;         // |<psi, N(w)>| relative, per record
  std::vector<double> max_div;      // divergence defect of the reconstructed velocity
  double horizon = 0.0;
  long steps = 0;
  Integrator integrator = Integrator::if_rk4;
  std::optional<GridField> final_state;

  std::size_t size() const { return u.times.size(); }
};

/// Records start at t = 0. Throws HorizonExceeded past 0.1 / k0^2,
/// CFLViolation when a fixed step breaks the CFL bound (a growing step is
/// clipped instead), BlowupDetected on non-finite values or energy above
/// 10x its initial value.
SimTrace evolve_nse(const GridField& u0, const SimConfig& cfg);

/// Velocity of the stream function A sin(m k0 x) sin(m k0 y); the nonlinear
/// term vanishes identically, so u(t) = e^{-2 m^2 k0^2 t} u0.
GridField make_taylor_green(const Grid& grid, int m, double amplitude);

/// Zeroes every mode outside the dealiasing mask |m_i| < fraction * N/2.
GridField dealias_truncate(const GridField& f, double fraction = 2.0 / 3.0);

// ---------------------------------------------------------------------------

struct EnergyAudit {
  double worst_margin = 0.0;     // min over s < t of (E(s) - E(t) - D(s,t)) / E(s)
  double equality_residual = 0.0;  // max over s < t of |E(s) - E(t) - D(s,t)| / E(s)
  bool inequality_holds = false;
  bool equality_holds = false;
  std::size_t pairs = 0;
};

EnergyAudit energy_audit(const SimTrace& trace, double tol = 1e-6);

struct SlopeFit {
  double slope = 0.0;
  double t1 = 0.0, t2 = 0.0;
  std::size_t samples = 0;
};

/// Least squares of log y against log t over t in [t1, t2]; needs a decade.
SlopeFit fit_loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double t1, double t2);

/// Last decade of the trace, starting at the latest record at or below
/// t_end / 10 and never before t = 10.
std::pair<double, double> default_fit_window(const SimTrace& trace);

struct WiegnerReport {
  double alpha = 0.0;  // amplitude convention: ||v(t)|| ~ t^{-alpha}
  double target = 0.0;  // -min(2 alpha, 1)
  double tolerance = 0.0;
  SlopeFit theta, u, v;
  bool exact_zero = false;  // theta vanished identically
  bool passes = false;
  std::string table_row;
};

WiegnerReport wiegner_difference_check(const SimTrace& trace, double alpha,
                                       std::optional<std::pair<double, double>> window = std::nullopt);

struct GradientReport {
  double alpha = 0.0;
  SlopeFit fit;
  double target = 0.0;  // -(alpha + 1/2)
  double sup_constant = 0.0;  // sup (1+t)^alpha t^{1/2} ||D u(t)||
  bool passes = false;
};

GradientReport gradient_decay_check(const SimTrace& trace, double alpha,
                                    std::optional<std::pair<double, double>> window = std::nullopt,
                                    double tolerance = 0.1);

struct LiminfReport {
  double alpha = 0.0;
  int l = 0;
  double inf = 0.0, sup = 0.0;
  double flatness = 0.0;  // sup / inf - 1
  double trend = 0.0;     // log-log slope of the compensated curve
  bool growing = false;   // trend > 0.05: no positive-liminf certificate
  bool certified = false;
  bool window_limited = true;
};

/// Compensated curve t^{alpha + l/2} ||D^l u(t)|| over the window.
LiminfReport liminf_check(const DecayProfile& p, double alpha, int l, std::pair<double, double> window,
                          double flat_tol = 0.1);

/// CSV columns t, l2_u, l2_v, theta, hdot1, hdot2, energy_residual.
void write_csv(std::ostream& out, const SimTrace& trace);

void save_checkpoint(const std::string& path, const GridField& state);
GridField load_checkpoint(const std::string& path);

}  // namespace specdecay
