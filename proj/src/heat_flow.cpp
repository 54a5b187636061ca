#include "specdecay/heat_flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fftw3.h>

#include "specdecay/errors.hpp"

namespace specdecay {

RadialProfile heat_evolve(const RadialProfile& u0, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_evolve: t must be nonnegative");
  if (t == 0.0) return u0;
  auto fr = u0.root_fn();
  auto ft = u0.tail_fn();
  nlohmann::json d = u0.descriptor();
  d["heat_time"] = d.value("heat_time", 0.0) + t;
  return RadialProfile(
      u0.dim(), [fr, t](double r) { return fr(r) * std::exp(-t * r * r); },
      [ft, t](double r) {
        const TailEstimate e = ft(r);
        return TailEstimate{e.value, e.error + e.value * -std::expm1(-2.0 * t * r * r)};
      },
      u0.support_lo(), u0.support_hi(), u0.breakpoints(), d, u0.nodes_per_decade());
}

GridField heat_evolve(const GridField& u0, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_evolve: t must be nonnegative");
  return GridField(u0.grid(), kernels::omp::heat_multiply(u0.grid(), u0.coeffs(), t));
}

Field heat_evolve(const Field& u0, double t) {
  return std::visit([t](const auto& f) { return Field(heat_evolve(f, t)); }, u0);
}

double validity_horizon(const Grid& grid) { return 0.1 / (grid.k0() * grid.k0()); }

// ---------------------------------------------------------------------------

double duhamel_factor(const std::function<double(double)>& phi, double t, double lambda, double* error,
                      int max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto f = [&](double s) { return std::exp(-(t - s) * lambda) * phi(s); };
  double e1 = 0.0, e2 = 0.0;
  const double tol = 1e-10;
  const double a = GK::integrate(f, 0.0, 0.5 * t, max_depth, tol, &e1);
  const double b = GK::integrate(f, 0.5 * t, t, max_depth, tol, &e2);
  const double v = a + b;
  const double err = e1 + e2;
  if (!std::isfinite(v) || err > 1e-6 * std::abs(v) + 1e-300) {
    std::ostringstream msg;
    msg << "Duhamel integral at t = " << t << ", |k|^2 = " << lambda << " did not converge (estimate " << v
        << ", error " << err << ")";
    throw QuadratureDivergence(msg.str());
  }
  if (error) *error = err;
  return v;
}

DuhamelResult stokes_duhamel(const GridField& u0, const ForcingSpec& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("stokes_duhamel: t must be positive");
  if (f.is_zero()) return {heat_evolve(u0, t), 0.0};
  const auto* g = std::get_if<GridField>(&*f.g);
  if (!g || !(g->grid() == u0.grid())) throw std::invalid_argument("stokes_duhamel: forcing must live on the same grid");
  const Grid& grid = u0.grid();
  const int dim = grid.dim();

  // Phi depends on |m|^2 only
  std::map<long, std::pair<double, double>> cache;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto m = grid.multi_index(p);
    const long m2 = long(m[0]) * m[0] + long(m[1]) * m[1] + long(m[2]) * m[2];
    if (cache.count(m2)) continue;
    double err = 0.0;
    const double v = duhamel_factor(f.phi, t, grid.k0() * grid.k0() * m2, &err);
    cache.emplace(m2, std::make_pair(v, err));
  }
  std::vector<cplx> c = kernels::omp::heat_multiply(grid, u0.coeffs(), t);
  const auto gc = g->coeffs();
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.points(); ++p) {
    const auto m = grid.multi_index(p);
    const auto& [phi_v, phi_e] = cache.at(long(m[0]) * m[0] + long(m[1]) * m[1] + long(m[2]) * m[2]);
    worst = std::max(worst, phi_e);
    for (int d = 0; d < dim; ++d) c[p * dim + d] += phi_v * gc[p * dim + d];
  }
  return {GridField(grid, std::move(c)), worst * norms(*g).l2};
}

RadialDuhamelResult stokes_duhamel(const RadialProfile& u0, const ForcingSpec& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("stokes_duhamel: t must be positive");
  if (f.is_zero()) return {heat_evolve(u0, t), 0.0};
  const auto* g = std::get_if<RadialProfile>(&*f.g);
  if (!g || g->dim() != u0.dim()) throw std::invalid_argument("stokes_duhamel: forcing must be a radial profile");
  auto phi = f.phi;
  auto ur = u0.root_fn();
  auto gr = g->root_fn();
  const double ulo = u0.support_lo(), uhi = u0.support_hi(), glo = g->support_lo(), ghi = g->support_hi();
  auto root = [=](double r) {
    const double a = (r < ulo || r > uhi) ? 0.0 : ur(r) * std::exp(-t * r * r);
    const double b = (r < glo || r > ghi) ? 0.0 : gr(r);
    return b == 0.0 ? a : a + duhamel_factor(phi, t, r * r) * b;
  };
  const double phi0 = duhamel_factor(phi, t, 0.0);
  auto ut = u0.tail_fn();
  auto gt = g->tail_fn();
  auto tail = [=](double r) {
    const TailEstimate x = ut(r), y = gt(r);
    const double sx = std::sqrt(std::max(x.value, 0.0)), sy = phi0 * std::sqrt(std::max(y.value, 0.0));
    return TailEstimate{x.value + sy * sy, 2.0 * sx * sy + x.error + phi0 * phi0 * y.error + x.value * -std::expm1(-2.0 * t * r * r)};
  };
  std::vector<double> br = u0.breakpoints();
  br.insert(br.end(), g->breakpoints().begin(), g->breakpoints().end());
  br.push_back(glo);
  br.push_back(ghi);
  nlohmann::json d = {{"kind", "stokes_flow"}, {"dim", u0.dim()}, {"initial", u0.descriptor()},
                      {"forcing", g->descriptor()}, {"time", t}};
  RadialProfile out(u0.dim(), root, tail, std::min(ulo, glo), std::max(uhi, ghi), br, d, u0.nodes_per_decade());

  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double r = glo + (ghi - glo) * i / 40.0;
    double err = 0.0;
    duhamel_factor(phi, t, r * r, &err);
    worst = std::max(worst, err);
  }
  return {std::move(out), worst * norms(*g).l2};
}

// ---------------------------------------------------------------------------

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double physical_lp_norm(const GridField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("physical_lp_norm: p must be >= 1");
  const Grid& g = f.grid();
  const int dim = g.dim();
  const int n = g.resolution();
  const std::size_t np = g.points();
  fftw_complex* buf = fftw_alloc_complex(np);
  int dims[3] = {n, n, n};
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(dim, dims, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  const double pref = g.cell_measure() / std::pow(2.0 * std::numbers::pi, 0.5 * dim);
  std::vector<double> mag2(np, 0.0);
  const auto c = f.coeffs();
  for (int comp = 0; comp < dim; ++comp) {
    for (std::size_t q = 0; q < np; ++q) {
      buf[q][0] = c[q * dim + comp].real();
      buf[q][1] = c[q * dim + comp].imag();
    }
    fftw_execute(plan);
    for (std::size_t q = 0; q < np; ++q) {
      const double v = pref * buf[q][0];
      mag2[q] += v * v;
    }
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  for (auto& m : mag2) m = std::pow(m, 0.5 * p);
  const double cell = std::pow(g.length() / n, dim);
  return std::pow(kernels::pairwise_sum(mag2) * cell, 1.0 / p);
}

ForcingBoundReport forcing_bound_check(const ForcingSpec& f, const std::vector<double>& t_samples) {
  ForcingBoundReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  double gl2 = 0.0;
  std::optional<double> gln;
  int dim = 2;
  if (!f.is_zero()) {
    gl2 = std::visit([](const auto& x) { return norms(x).l2; }, *f.g);
    if (const auto* gg = std::get_if<GridField>(&*f.g)) {
      dim = gg->dim();
      if (dim >= 3) gln = physical_lp_norm(*gg, dim);
    } else {
      dim = std::get<RadialProfile>(*f.g).dim();
    }
  }
  rep.ln_checked = gln.has_value();
  for (double t : t_samples) {
    if (!(t > 0.0)) throw std::invalid_argument("forcing_bound_check: samples must be positive");
    ForcingSample s;
    s.t = t;
    const double amp = f.is_zero() ? 0.0 : std::abs(f.phi(t));
    s.l2 = amp * gl2;
    s.l2_bound = f.C_f * std::pow(1.0 + t, -f.alpha - 1.0);
    if (s.l2 > 0.0) rep.worst_margin = std::min(rep.worst_margin, s.l2_bound / s.l2);
    if (gln) {
      s.ln = amp * *gln;
      s.ln_bound = f.K_f * std::pow(t, -f.alpha - 0.25 * (dim + 2));
      if (*s.ln > 0.0) rep.worst_margin = std::min(rep.worst_margin, *s.ln_bound / *s.ln);
    }
    rep.samples.push_back(s);
  }
  rep.passes = rep.worst_margin >= 1.0 - 1e-12;
  return rep;
}

// ---------------------------------------------------------------------------

SplittingReport fourier_splitting_check(const RadialProfile& u0, std::optional<double> sigma,
                                        const std::vector<double>& t_samples) {
  SplittingReport rep;
  rep.sigma = sigma;
  const double inf = std::numeric_limits<double>::infinity();
  auto energy = [&](double t) { return radial_integral(u0, 0.0, inf, {.heat_time = t}).value; };
  double comp_lo = inf, comp_hi = 0.0;
  for (double t : t_samples) {
    if (!(t >= 0.0)) throw std::invalid_argument("fourier_splitting_check: samples must be nonnegative");
    SplittingSample s;
    s.t = t;
    s.energy = energy(t);
    s.derivative = -2.0 * radial_integral(u0, 0.0, inf, {.power = 1, .heat_time = t}).value;
    s.g = 1.0 / std::sqrt(1.0 + t);
    s.lhs = s.derivative + s.g * s.g * s.energy;
    s.rhs = s.g * s.g * radial_integral(u0, 0.0, s.g, {.heat_time = t}).value;
    const double scale = std::max(std::abs(s.lhs), std::abs(s.rhs));
    s.margin = scale > 0.0 ? (s.rhs - s.lhs) / scale : 0.0;
    if (sigma) {
      s.compensated = s.rhs * std::pow(1.0 + t, 1.0 + *sigma);
      if (t >= 10.0 && t <= 1e6) {
        comp_lo = std::min(comp_lo, s.compensated);
        comp_hi = std::max(comp_hi, s.compensated);
      }
    }
    rep.samples.push_back(s);
  }
  rep.worst_margin = inf;
  for (const auto& s : rep.samples) rep.worst_margin = std::min(rep.worst_margin, s.margin);
  if (rep.samples.empty()) rep.worst_margin = 0.0;
  rep.inequality_holds = rep.worst_margin >= -kSplittingTol;

  if (!rep.samples.empty()) {
    const std::size_t picks[3] = {0, rep.samples.size() / 2, rep.samples.size() - 1};
    for (std::size_t i : picks) {
      const auto& s = rep.samples[i];
      const double h = std::max(1e-4 * s.t, 1e-6);
      const double lo = std::max(0.0, s.t - h);
      const double fd = (energy(s.t + h) - energy(lo)) / (s.t + h - lo);
      const double scale = std::max(std::abs(s.derivative), 1e-300);
      if (s.derivative != 0.0 || fd != 0.0) rep.fd_check = std::max(rep.fd_check, std::abs(fd - s.derivative) / scale);
    }
  }
  if (sigma && comp_hi > 0.0 && comp_lo > 0.0) {
    rep.comp_ratio = comp_hi / comp_lo;
    rep.rhs_bounded = rep.comp_ratio <= 10.0;
  }
  return rep;
}

// ---------------------------------------------------------------------------

const std::vector<double>& DecayProfile::series(int l) const {
  switch (l) {
    case 0: return l2;
    case 1: return hdot1;
    case 2: return hdot2;
  }
  throw std::invalid_argument("DecayProfile::series: l must be 0, 1 or 2");
}

std::vector<double> log_time_grid(double t_lo, double t_hi, int per_decade) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo) || per_decade < 1)
    throw std::invalid_argument("log_time_grid: need 0 < t_lo < t_hi and per_decade >= 1");
  const double decades = std::log10(t_hi / t_lo);
  const int steps = std::max(1, static_cast<int>(std::lround(decades * per_decade)));
  std::vector<double> t(steps + 1);
  for (int i = 0; i <= steps; ++i) t[i] = t_lo * std::pow(10.0, decades * i / steps);
  t.back() = t_hi;
  return t;
}

namespace {

void check_times(const std::vector<double>& times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0)) throw std::invalid_argument("decay_profile: times must be nonnegative");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("decay_profile: times must increase");
  }
}

}  // namespace

DecayProfile decay_profile(const Field& u0, const std::vector<double>& times, const ForcingSpec* forcing) {
  check_times(times);
  DecayProfile out;
  out.times = times;
  const bool forced = forcing && !forcing->is_zero();
  const double inf = std::numeric_limits<double>::infinity();
  if (const auto* r = std::get_if<RadialProfile>(&u0)) {
    out.backend = "radial";
    for (double t : times) {
      std::array<double, 3> e{};
      if (forced && t > 0.0) {
        const RadialProfile v = stokes_duhamel(*r, *forcing, t).field;
        for (int l = 0; l < 3; ++l) e[l] = radial_integral(v, 0.0, inf, {.power = l}).value;
      } else {
        for (int l = 0; l < 3; ++l) e[l] = radial_integral(*r, 0.0, inf, {.power = l, .heat_time = t}).value;
      }
      out.l2.push_back(std::sqrt(e[0]));
      out.hdot1.push_back(std::sqrt(e[1]));
      out.hdot2.push_back(std::sqrt(e[2]));
      out.horizon_flag.push_back(false);
    }
    return out;
  }
  const auto& g = std::get<GridField>(u0);
  out.backend = "grid";
  out.horizon = validity_horizon(g.grid());
  if (!times.empty() && times.back() > out.horizon) {
    std::ostringstream msg;
    msg << "grid decay profile requested to t = " << times.back() << " beyond the validity horizon "
        << out.horizon << " (0.1 / k0^2)";
    throw HorizonExceeded(msg.str());
  }
  for (double t : times) {
    std::array<double, 3> e{};
    if (forced && t > 0.0) {
      const GridField v = stokes_duhamel(g, *forcing, t).field;
      for (int l = 0; l < 3; ++l) e[l] = sobolev_energy(v, l);
    } else {
      for (int l = 0; l < 3; ++l)
        e[l] = kernels::omp::weighted_energy(g.grid(), g.coeffs(), {.power = l, .heat_time = t});
    }
    out.l2.push_back(std::sqrt(e[0]));
    out.hdot1.push_back(std::sqrt(e[1]));
    out.hdot2.push_back(std::sqrt(e[2]));
    out.horizon_flag.push_back(t > 0.1 * out.horizon);
  }
  return out;
}

void write_csv(std::ostream& out, const DecayProfile& p) {
  out << "t,l2,hdot1,hdot2,backend,horizon_flag\n" << std::setprecision(17);
  for (std::size_t i = 0; i < p.size(); ++i)
    out << p.times[i] << ',' << p.l2[i] << ',' << p.hdot1[i] << ',' << p.hdot2[i] << ',' << p.backend << ','
        << (p.horizon_flag[i] ? 1 : 0) << '\n';
}

}  // namespace specdecay
