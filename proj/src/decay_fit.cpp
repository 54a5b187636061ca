#include "specdecay/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "specdecay/errors.hpp"

namespace specdecay {

const char* to_string(RateVerdict v) {
  switch (v) {
    case RateVerdict::two_sided: return "two_sided";
    case RateVerdict::upper_only: return "upper_only";
    case RateVerdict::lower_only: return "lower_only";
    case RateVerdict::no_algebraic_rate: return "no_algebraic_rate";
  }
  return "unknown";
}

namespace {

// ||u - v|| below this fraction of ||v|| counts as round-off.
constexpr double kExactTol = 1e-12;

double lsq_slope(const std::vector<double>& x, const std::vector<double>& z, std::size_t lo, std::size_t hi) {
  const double n = static_cast<double>(hi - lo);
  double mx = 0.0, mz = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    mx += x[i];
    mz += z[i];
  }
  mx /= n;
  mz /= n;
  double sxx = 0.0, sxz = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxz += (x[i] - mx) * (z[i] - mz);
  }
  return sxx > 0.0 ? sxz / sxx : 0.0;
}

// Log-log fit of y against exp(x) with the compensated curve y e^{-s x}.
struct Compensated {
  double slope = 0.0;       // fitted d log y / dx
  double slope_used = 0.0;  // compensation slope
  double early = 0.0, late = 0.0, drift = 0.0;
  double c = 0.0, C = 0.0;  // inf / sup of the compensated curve
  double residual = 0.0;
  double first = 0.0, last = 0.0;
  bool positive = true;
  std::size_t samples = 0;
};

Compensated compensate(const std::vector<double>& x, const std::vector<double>& y, std::optional<double> slope_used) {
  Compensated r;
  r.samples = x.size();
  for (double v : y)
    if (!(v > 0.0) || !std::isfinite(v)) r.positive = false;
  if (!r.positive) return r;
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = std::log(y[i]);
  const std::size_t n = x.size(), mid = n / 2;
  r.slope = lsq_slope(x, z, 0, n);
  r.early = lsq_slope(x, z, 0, mid + 1);
  r.late = lsq_slope(x, z, mid, n);
  const double scale = std::max({std::abs(r.early), std::abs(r.late), 1e-300});
  r.drift = std::abs(r.early - r.late) / scale;
  r.slope_used = slope_used.value_or(r.slope);
  std::vector<double> lc(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lc[i] = z[i] - r.slope_used * x[i];
    mean += lc[i];
  }
  mean /= n;
  r.c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    r.residual = std::max(r.residual, std::abs(lc[i] - mean));
    r.c = std::min(r.c, std::exp(lc[i]));
    r.C = std::max(r.C, std::exp(lc[i]));
  }
  r.first = lc.front();
  r.last = lc.back();
  return r;
}

void require_decade(double lo, double hi, std::size_t samples, const char* what) {
  if (samples < 3 || !(hi >= 10.0 * lo * (1.0 - 1e-9))) {
    std::ostringstream msg;
    msg << what << ": fewer than one decade of samples in [" << lo << ", " << hi << "]";
    throw WindowTooShort(msg.str());
  }
}

}  // namespace

DecayCertificate fit_rate(const std::vector<double>& t, const std::vector<double>& energy,
                          std::pair<double, double> window, const FitOptions& opt) {
  if (t.size() != energy.size()) throw std::invalid_argument("fit_rate: size mismatch");
  std::vector<double> x, y, ts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.first * (1.0 - 1e-12) || t[i] > window.second * (1.0 + 1e-12)) continue;
    ts.push_back(t[i]);
    x.push_back(std::log1p(t[i]));
    y.push_back(energy[i]);
  }
  require_decade(ts.empty() ? 0.0 : ts.front(), ts.empty() ? 0.0 : ts.back(), ts.size(), "fit_rate");

  std::optional<double> claimed;
  if (opt.claimed_sigma) claimed = -*opt.claimed_sigma;
  const Compensated k = compensate(x, y, claimed);

  DecayCertificate c;
  c.t1 = ts.front();
  c.t2 = ts.back();
  c.samples = ts.size();
  c.positive = k.positive;
  if (!k.positive) {
    c.verdict = RateVerdict::no_algebraic_rate;
    c.convention = ConventionRecord::of(c.exponent());
    return c;
  }
  c.sigma_hat = -k.slope;
  c.sigma_used = -k.slope_used;
  c.c_lower = k.c;
  c.C_upper = k.C;
  c.residual = k.residual;
  c.slope_early = k.early;
  c.slope_late = k.late;
  c.drift = k.drift;
  if (k.drift > opt.drift_cap || c.sigma_hat <= opt.min_sigma)
    c.verdict = RateVerdict::no_algebraic_rate;
  else if (c.C_upper <= opt.ratio_cap * c.c_lower && c.residual <= opt.residual_cap)
    c.verdict = RateVerdict::two_sided;
  else
    c.verdict = k.last < k.first ? RateVerdict::upper_only : RateVerdict::lower_only;
  c.convention = ConventionRecord::of(c.exponent());
  return c;
}

DecayCertificate fit_rate(const DecayProfile& p, std::pair<double, double> window, const FitOptions& opt) {
  std::vector<double> e(p.l2.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = p.l2[i] * p.l2[i];
  return fit_rate(p.times, e, window, opt);
}

// ---------------------------------------------------------------------------

std::vector<double> rho_ladder(double rho_lo, double rho_hi, int per_decade) {
  if (!(rho_lo > 0.0) || !(rho_hi > rho_lo) || per_decade < 1)
    throw std::invalid_argument("rho_ladder: need 0 < rho_lo < rho_hi");
  const double decades = std::log10(rho_hi / rho_lo);
  const int n = static_cast<int>(std::lround(decades * per_decade));
  std::vector<double> r(n + 1);
  for (int i = 0; i <= n; ++i) r[i] = rho_lo * std::pow(10.0, decades * i / n);
  return r;
}

namespace {

ConditionVerdict heat_condition(const std::vector<double>& t, const std::vector<double>& e, double sigma,
                                const EquivalenceOptions& opt) {
  FitOptions f = opt.fit;
  f.claimed_sigma = sigma;
  const DecayCertificate c = fit_rate(t, e, opt.time_window, f);
  ConditionVerdict v;
  v.exponent = c.sigma_hat;
  v.c = c.c_lower;
  v.C = c.C_upper;
  v.holds = c.verdict == RateVerdict::two_sided && std::abs(c.sigma_hat - sigma) <= opt.exponent_tol;
  v.detail = to_string(c.verdict);
  return v;
}

ConditionVerdict mass_condition(const std::vector<double>& rho, const std::vector<double>& mass, double sigma,
                                const EquivalenceOptions& opt) {
  std::vector<double> x(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) x[i] = std::log(rho[i]);
  const Compensated k = compensate(x, mass, 2.0 * sigma);
  ConditionVerdict v;
  if (!k.positive) {
    v.detail = "mass vanishes on the ladder";
    return v;
  }
  v.exponent = 0.5 * k.slope;
  v.c = k.c;
  v.C = k.C;
  const bool algebraic = k.drift <= opt.fit.drift_cap && v.exponent > opt.fit.min_sigma;
  v.holds = algebraic && std::abs(v.exponent - sigma) <= opt.exponent_tol && k.C <= opt.fit.ratio_cap * k.c &&
            k.residual <= opt.fit.residual_cap;
  std::ostringstream d;
  d << "drift " << k.drift << ", C/c " << k.C / k.c;
  v.detail = d.str();
  return v;
}

ConditionVerdict membership_condition(const DyadicSpectrum& s, double sigma, int stride,
                                     const EquivalenceOptions& opt) {
  std::vector<double> x(s.size()), e(s.block_energy);
  for (int i = 0; i < s.size(); ++i) x[i] = (s.j_min + i) * std::log(2.0);
  const Compensated k = compensate(x, e, 2.0 * sigma);
  ConditionVerdict v;
  if (!k.positive) {
    v.detail = "empty blocks in the window";
    return v;
  }
  v.exponent = 0.5 * k.slope;
  const bool algebraic = k.drift <= opt.fit.drift_cap && v.exponent > opt.fit.min_sigma;
  // Membership itself is tested at the block exponent; sigma only has to be
  // within the same tolerance as the other two conditions.
  const MembershipVerdict m = script_A_membership(s, v.exponent, stride);
  v.c = m.c;
  v.C = m.C;
  v.holds = algebraic && std::abs(v.exponent - sigma) <= opt.exponent_tol && k.C <= opt.fit.ratio_cap * k.c &&
            k.residual <= opt.fit.residual_cap && m.in_besov && m.in_script_A;
  if (!algebraic)
    v.detail = "block norms drift";
  else if (!m.in_besov)
    v.detail = "not in the Besov space";
  else if (!m.in_script_A)
    v.detail = "lower bound vanishes";
  return v;
}

}  // namespace

EquivalenceReport equivalence_report(const RadialProfile& u0, const std::vector<double>& sigma_grid,
                                     const std::vector<double>& ladder, const EquivalenceOptions& opt) {
  if (ladder.size() < 2 || !(ladder.front() > 0.0) || !std::is_sorted(ladder.begin(), ladder.end()))
    throw std::invalid_argument("equivalence_report: ladder must be positive and increasing");
  if (std::log10(ladder.back() / ladder.front()) < 5.0 - 1e-9) {
    std::ostringstream msg;
    msg << "rho ladder [" << ladder.front() << ", " << ladder.back() << "] spans fewer than five decades";
    throw WindowTooShort(msg.str());
  }

  EquivalenceReport rep;
  rep.rho_ladder = ladder;
  const auto times = log_time_grid(opt.time_window.first, opt.time_window.second, opt.time_per_decade);
  const DecayProfile heat = decay_profile(Field(u0), times);
  std::vector<double> energy(heat.size());
  for (std::size_t i = 0; i < energy.size(); ++i) energy[i] = heat.l2[i] * heat.l2[i];
  rep.fit = fit_rate(times, energy, opt.time_window, opt.fit);

  std::vector<double> mass(ladder.size());
  for (std::size_t i = 0; i < ladder.size(); ++i) mass[i] = low_freq_mass(u0, ladder[i]);

  const int j_min = static_cast<int>(std::ceil(std::log2(ladder.front())));
  const int j_max = static_cast<int>(std::floor(std::log2(ladder.back()))) - 1;
  const DyadicSpectrum blocks = dyadic_blocks(u0, j_min, j_max, opt.mode);

  std::vector<double> sigmas;
  sigmas.push_back(rep.fit.sigma_hat);
  sigmas.insert(sigmas.end(), sigma_grid.begin(), sigma_grid.end());
  rep.agree = true;
  for (double sigma : sigmas) {
    EquivalenceRow row;
    row.sigma = sigma;
    row.heat = heat_condition(times, energy, sigma, opt);
    row.mass = mass_condition(ladder, mass, sigma, opt);
    row.membership = membership_condition(blocks, sigma, opt.stride, opt);
    row.agree = row.heat.holds == row.mass.holds && row.mass.holds == row.membership.holds;
    rep.agree = rep.agree && row.agree;
    rep.rows.push_back(std::move(row));
  }
  std::ostringstream cav;
  cav << "limits replaced by windows: t in [" << opt.time_window.first << ", " << opt.time_window.second
      << "], rho in [" << ladder.front() << ", " << ladder.back() << "], blocks j in [" << j_min << ", " << j_max
      << "]";
  rep.caveat = cav.str();
  return rep;
}

// ---------------------------------------------------------------------------

InverseWiegnerReport inverse_wiegner_check(const SimTrace& sim, std::optional<std::pair<double, double>> window,
                                           double tol) {
  const auto w = window ? *window : default_fit_window(sim);
  auto squares = [](const std::vector<double>& a) {
    std::vector<double> s(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] * a[i];
    return s;
  };
  const auto eu = squares(sim.u.l2), ev = squares(sim.v.l2);
  InverseWiegnerReport rep;
  rep.v = fit_rate(sim.v.times, ev, w);
  FitOptions common;
  common.claimed_sigma = rep.v.sigma_hat;
  rep.u = fit_rate(sim.u.times, eu, w, common);
  rep.sigma_gap = std::abs(rep.u.sigma_hat - rep.v.sigma_hat);

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  rep.exact = true;
  for (std::size_t i = 0; i < sim.size(); ++i) {
    const double t = sim.u.times[i];
    if (t < w.first * (1.0 - 1e-12) || t > w.second * (1.0 + 1e-12)) continue;
    if (sim.theta_l2[i] > kExactTol * sim.v.l2[i]) rep.exact = false;
    if (sim.v.l2[i] > 0.0) {
      const double q = sim.u.l2[i] / sim.v.l2[i];
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
  }
  rep.ratio_spread = lo > 0.0 && std::isfinite(lo) ? hi / lo : std::numeric_limits<double>::infinity();
  const bool comparable = rep.u.C_upper <= 10.0 * rep.v.C_upper && rep.v.C_upper <= 10.0 * rep.u.C_upper;
  rep.passes = rep.exact || (rep.sigma_gap <= tol && comparable);
  const int n = sim.final_state ? sim.final_state->dim() : 2;
  if (rep.v.sigma_hat > 0.5 * (n + 2))
    rep.note = "sigma exceeds (n+2)/2, outside the range where the nonlinear transfer is claimed";
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const DecayCertificate& c) {
  return {{"sigma_hat", c.sigma_hat},
          {"sigma_used", c.sigma_used},
          {"c_lower", c.c_lower},
          {"C_upper", c.C_upper},
          {"residual", c.residual},
          {"slope_early", c.slope_early},
          {"slope_late", c.slope_late},
          {"drift", c.drift},
          {"window", {c.t1, c.t2}},
          {"samples", c.samples},
          {"positive", c.positive},
          {"verdict", to_string(c.verdict)},
          {"convention",
           {{"sigma", c.convention.sigma},
            {"alpha_energy", c.convention.alpha_energy},
            {"alpha_amplitude", c.convention.alpha_amplitude}}}};
}

namespace {
nlohmann::json to_json(const ConditionVerdict& v) {
  return {{"holds", v.holds}, {"exponent", v.exponent}, {"c", v.c}, {"C", v.C}, {"detail", v.detail}};
}
}  // namespace

nlohmann::json to_json(const EquivalenceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"sigma", row.sigma},
                    {"heat_decay", to_json(row.heat)},
                    {"low_freq_mass", to_json(row.mass)},
                    {"membership", to_json(row.membership)},
                    {"agree", row.agree}});
  return {{"fit", to_json(r.fit)},
          {"rows", rows},
          {"rho_range", {r.rho_ladder.front(), r.rho_ladder.back()}},
          {"agree", r.agree},
          {"caveat", r.caveat}};
}

nlohmann::json to_json(const InverseWiegnerReport& r) {
  return {{"u", to_json(r.u)},
          {"v", to_json(r.v)},
          {"sigma_gap", r.sigma_gap},
          {"ratio_spread", r.ratio_spread},
          {"exact", r.exact},
          {"passes", r.passes},
          {"note", r.note}};
}

void write_text(std::ostream& out, const DecayCertificate& c) {
  out << std::left << std::setw(14) << "sigma_hat" << c.sigma_hat << '\n'
      << std::setw(14) << "sigma_used" << c.sigma_used << '\n'
      << std::setw(14) << "c_lower" << c.c_lower << '\n'
      << std::setw(14) << "C_upper" << c.C_upper << '\n'
      << std::setw(14) << "residual" << c.residual << '\n'
      << std::setw(14) << "drift" << c.drift << '\n'
      << std::setw(14) << "window" << c.t1 << " .. " << c.t2 << '\n'
      << std::setw(14) << "verdict" << to_string(c.verdict) << '\n';
}

void write_text(std::ostream& out, const EquivalenceReport& r) {
  out << std::left << std::setw(12) << "sigma" << std::setw(10) << "heat" << std::setw(10) << "mass"
      << std::setw(12) << "membership" << "agree\n";
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  for (const auto& row : r.rows)
    out << std::setw(12) << row.sigma << std::setw(10) << yn(row.heat.holds) << std::setw(10) << yn(row.mass.holds)
        << std::setw(12) << yn(row.membership.holds) << yn(row.agree) << '\n';
  out << "fitted sigma " << r.fit.sigma_hat << " (" << to_string(r.fit.verdict) << ")\n" << r.caveat << '\n';
}

}  // namespace specdecay
