#include "specdecay/nse_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fftw3.h>

#include "specdecay/errors.hpp"
#include "specdecay/kernels.hpp"

namespace specdecay {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <class T>
struct FftwDeleter {
  void operator()(T* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * n)));
}

// Half-spectrum geometry and transforms for one N x N grid. Plans are
// single-threaded and built with FFTW_ESTIMATE so results do not depend on
// planner timing or the OpenMP thread count.
class Spectral2D {
 public:
  explicit Spectral2D(const Grid& g, double dealias) : grid_(g), n_(g.resolution()), nh_(n_ / 2 + 1) {
    const double k0 = g.k0();
    size_ = static_cast<std::size_t>(n_) * nh_;
    kx_.resize(size_);
    ky_.resize(size_);
    k2_.resize(size_);
    mask_.resize(size_);
    weight_.resize(size_);
    const double band = dealias * (n_ / 2);
    for (int ix = 0; ix < n_; ++ix) {
      const int mx = g.frequency_index(ix);
      for (int iy = 0; iy < nh_; ++iy) {
        const int my = iy;  // 0..N/2
        const std::size_t h = index(ix, iy);
        kx_[h] = k0 * mx;
        ky_[h] = k0 * my;
        k2_[h] = kx_[h] * kx_[h] + ky_[h] * ky_[h];
        const bool nyquist = mx == -n_ / 2 || my == n_ / 2;
        mask_[h] = (!nyquist && std::abs(mx) < band && my < band && h != 0) ? 1.0 : 0.0;
        weight_[h] = (iy == 0 || iy == n_ / 2) ? 1.0 : 2.0;
      }
    }
    scale_ = k0 * k0 / (2.0 * std::numbers::pi);
    cbuf_ = fftw_buffer<fftw_complex>(size_);
    for (auto& r : rbuf_) r = fftw_buffer<double>(static_cast<std::size_t>(n_) * n_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    c2r_ = fftw_plan_dft_c2r_2d(n_, n_, cbuf_.get(), rbuf_[0].get(), FFTW_ESTIMATE);
    r2c_ = fftw_plan_dft_r2c_2d(n_, n_, rbuf_[0].get(), cbuf_.get(), FFTW_ESTIMATE);
  }

  ~Spectral2D() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(c2r_);
    fftw_destroy_plan(r2c_);
  }

  Spectral2D(const Spectral2D&) = delete;
  Spectral2D& operator=(const Spectral2D&) = delete;

  std::size_t size() const { return size_; }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(ix) * nh_ + iy; }
  double k2(std::size_t h) const { return k2_[h]; }
  double mask(std::size_t h) const { return mask_[h]; }

  /// -FFT(u . grad w) on the dealiased modes; returns max |u| in physical space.
  double nonlinear(const std::vector<cplx>& w, std::vector<cplx>& out) {
    auto fill = [&](int slot, auto&& coeff) {
#pragma omp parallel for schedule(static)
      for (int ix = 0; ix < n_; ++ix) {
        for (int iy = 0; iy < nh_; ++iy) {
          const std::size_t h = index(ix, iy);
          const cplx c = scale_ * coeff(h);
          cbuf_[h][0] = c.real();
          cbuf_[h][1] = c.imag();
        }
      }
      fftw_execute_dft_c2r(c2r_, cbuf_.get(), rbuf_[slot].get());
    };
    const cplx I(0.0, 1.0);
    auto psi = [&](std::size_t h) { return k2_[h] > 0.0 ? w[h] / k2_[h] : cplx(0.0); };
    fill(0, [&](std::size_t h) { return I * ky_[h] * psi(h); });
    fill(1, [&](std::size_t h) { return -I * kx_[h] * psi(h); });
    fill(2, [&](std::size_t h) { return I * kx_[h] * w[h]; });
    fill(3, [&](std::size_t h) { return I * ky_[h] * w[h]; });

    const std::size_t np = static_cast<std::size_t>(n_) * n_;
    double* u = rbuf_[0].get();
    double* v = rbuf_[1].get();
    const double* wx = rbuf_[2].get();
    const double* wy = rbuf_[3].get();
    double umax2 = 0.0;
#pragma omp parallel for schedule(static) reduction(max : umax2)
    for (std::size_t q = 0; q < np; ++q) {
      umax2 = std::max(umax2, u[q] * u[q] + v[q] * v[q]);
      u[q] = u[q] * wx[q] + v[q] * wy[q];
    }
    fftw_execute_dft_r2c(r2c_, u, cbuf_.get());
    const double back = -1.0 / (static_cast<double>(np) * scale_);
    out.resize(size_);
#pragma omp parallel for schedule(static)
    for (std::size_t h = 0; h < size_; ++h) out[h] = back * mask_[h] * cplx(cbuf_[h][0], cbuf_[h][1]);
    return std::sqrt(umax2);
  }

  /// k0^2 sum over the full spectrum of |w|^2 |k|^{2(l-1)}, i.e. ||D^l u||^2.
  double energy(const std::vector<cplx>& w, int l) const {
    std::vector<double> partial(n_, 0.0);
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < n_; ++ix) {
      double s = 0.0;
      for (int iy = 0; iy < nh_; ++iy) {
        const std::size_t h = index(ix, iy);
        if (k2_[h] == 0.0) continue;
        double f = weight_[h] * std::norm(w[h]);
        if (l == 0) f /= k2_[h];
        if (l == 2) f *= k2_[h];
        s += f;
      }
      partial[ix] = s;
    }
    return kernels::pairwise_sum(partial) * grid_.cell_measure();
  }

  /// |<psi, N>| / (||psi|| ||u||_inf ||grad w||), the discrete skew-symmetry residual.
  double skew(const std::vector<cplx>& w, const std::vector<cplx>& nl, double umax) const {
    std::vector<double> dot(n_, 0.0), psi2(n_, 0.0), grad2(n_, 0.0);
#pragma omp parallel for schedule(static)
    for (int ix = 0; ix < n_; ++ix) {
      for (int iy = 0; iy < nh_; ++iy) {
        const std::size_t h = index(ix, iy);
        if (k2_[h] == 0.0) continue;
        const cplx psi = w[h] / k2_[h];
        dot[ix] += weight_[h] * (std::conj(psi) * nl[h]).real();
        psi2[ix] += weight_[h] * std::norm(psi);
        grad2[ix] += weight_[h] * std::norm(w[h]) * k2_[h];
      }
    }
    const double denom = std::sqrt(kernels::pairwise_sum(psi2) * kernels::pairwise_sum(grad2)) * umax;
    const double num = std::abs(kernels::pairwise_sum(dot));
    return denom > 0.0 ? num / denom : 0.0;
  }

  std::vector<cplx> to_vorticity(const GridField& u) const {
    std::vector<cplx> w(size_);
    const cplx I(0.0, 1.0);
    for (int ix = 0; ix < n_; ++ix)
      for (int iy = 0; iy < nh_; ++iy) {
        const std::size_t h = index(ix, iy);
        const auto c = u.at(static_cast<std::size_t>(ix) * n_ + iy);
        w[h] = I * kx_[h] * c[1] - I * ky_[h] * c[0];
      }
    w[0] = 0.0;
    return w;
  }

  GridField to_velocity(const std::vector<cplx>& w) const {
    std::vector<cplx> c(grid_.points() * 2);
    const cplx I(0.0, 1.0);
    for (int ix = 0; ix < n_; ++ix)
      for (int iy = 0; iy < n_; ++iy) {
        cplx wk;
        double kx, ky;
        if (iy < nh_) {
          const std::size_t h = index(ix, iy);
          wk = w[h];
          kx = kx_[h];
          ky = ky_[h];
        } else {
          const std::size_t h = index((n_ - ix) % n_, n_ - iy);
          wk = std::conj(w[h]);
          kx = -kx_[h];
          ky = -ky_[h];
        }
        const double k2 = kx * kx + ky * ky;
        if (k2 == 0.0) continue;
        const std::size_t p = static_cast<std::size_t>(ix) * n_ + iy;
        c[2 * p] = I * ky * wk / k2;
        c[2 * p + 1] = -I * kx * wk / k2;
      }
    return GridField(grid_, std::move(c));
  }

  /// max |k . u^| / (|k| |u^|) of the velocity implied by w, evaluated on the half spectrum.
  double divergence(const std::vector<cplx>& w) const {
    double worst = 0.0;
    const cplx I(0.0, 1.0);
    for (std::size_t h = 0; h < size_; ++h) {
      if (k2_[h] == 0.0 || w[h] == 0.0) continue;
      const cplx ux = I * ky_[h] * w[h] / k2_[h];
      const cplx uy = -I * kx_[h] * w[h] / k2_[h];
      const cplx dot = kx_[h] * ux + ky_[h] * uy;
      worst = std::max(worst, std::abs(dot) / (std::sqrt(k2_[h]) * std::sqrt(std::norm(ux) + std::norm(uy))));
    }
    return worst;
  }

 private:
  Grid grid_;
  int n_, nh_;
  std::size_t size_ = 0;
  std::vector<double> kx_, ky_, k2_, mask_, weight_;
  double scale_ = 1.0;
  FftwBuffer<fftw_complex> cbuf_;
  std::array<FftwBuffer<double>, 4> rbuf_;
  fftw_plan c2r_ = nullptr, r2c_ = nullptr;
};

void check_finite(const std::vector<cplx>& w, double t) {
  for (const cplx& c : w)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream msg;
      msg << "non-finite vorticity at t = " << t;
      throw BlowupDetected(msg.str());
    }
}

}  // namespace

GridField dealias_truncate(const GridField& f, double fraction) {
  const Grid& g = f.grid();
  const double band = fraction * (g.resolution() / 2);
  std::vector<cplx> c(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t p = 0; p < g.points(); ++p) {
    const auto m = g.multi_index(p);
    bool keep = !g.is_nyquist(p);
    for (int d = 0; d < g.dim(); ++d) keep = keep && std::abs(m[d]) < band;
    if (!keep)
      for (int d = 0; d < g.dim(); ++d) c[p * g.dim() + d] = 0.0;
  }
  return GridField(g, std::move(c));
}

GridField make_taylor_green(const Grid& grid, int m, double amplitude) {
  if (grid.dim() != 2) throw std::invalid_argument("make_taylor_green: 2D only");
  if (m < 1 || m > grid.max_index()) throw std::invalid_argument("make_taylor_green: mode out of range");
  const double k0 = grid.k0();
  const double psi = -0.25 * amplitude * 2.0 * std::numbers::pi / (k0 * k0);
  std::vector<cplx> c(grid.points() * 2);
  const cplx I(0.0, 1.0);
  for (int sx : {-1, 1})
    for (int sy : {-1, 1}) {
      const std::size_t p = grid.flat_index({sx * m, sy * m, 0});
      const double kx = sx * m * k0, ky = sy * m * k0;
      const cplx ps = psi * sx * sy;
      c[2 * p] = I * ky * ps;
      c[2 * p + 1] = -I * kx * ps;
    }
  return GridField(grid, std::move(c));
}

SimTrace evolve_nse(const GridField& u0, const SimConfig& cfg) {
  const Grid& g = u0.grid();
  if (g.dim() != 2) throw std::invalid_argument("evolve_nse: only 2D grids are supported");
  if (!(g == cfg.grid)) throw std::invalid_argument("evolve_nse: initial field and config use different grids");
  if (!(cfg.dt > 0.0) || cfg.dt_growth < 0.0 || !(cfg.dt_max >= cfg.dt) || !(cfg.cfl > 0.0))
    throw std::invalid_argument("evolve_nse: bad time-step parameters");
  const double horizon = validity_horizon(g);
  if (cfg.t_end > horizon * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "t_end = " << cfg.t_end << " exceeds the validity horizon " << horizon;
    throw HorizonExceeded(msg.str());
  }
  std::vector<double> records = cfg.record_times.empty() ? log_time_grid(std::min(1.0, 0.1 * cfg.t_end), cfg.t_end, 20) : cfg.record_times;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!(records[i] > 0.0) || records[i] > cfg.t_end * (1.0 + 1e-12) || (i > 0 && !(records[i] > records[i - 1])))
      throw std::invalid_argument("evolve_nse: record times must increase inside (0, t_end]");
  }

  Spectral2D sp(g, cfg.dealias);
  std::vector<cplx> w = sp.to_vorticity(u0);
  {
    double outside = 0.0, total = 0.0;
    for (std::size_t h = 0; h < sp.size(); ++h) {
      const double e = std::norm(w[h]);
      total += e;
      if (sp.mask(h) == 0.0) outside += e;
    }
    if (outside > 1e-24 * total) throw std::invalid_argument("evolve_nse: initial data is not dealias-truncated");
  }
  const std::vector<cplx> w0 = w;
  const double e0 = sp.energy(w0, 0);
  const double sqrt_e0 = std::sqrt(e0);

  SimTrace tr;
  tr.horizon = horizon;
  tr.integrator = cfg.integrator;
  tr.u.backend = tr.v.backend = "grid";
  tr.u.horizon = tr.v.horizon = horizon;

  std::vector<cplx> k1, k2, k3, k4, a(sp.size()), b(sp.size()), c(sp.size()), theta(sp.size());
  auto dissipation = [&](const std::vector<cplx>& x) { return 2.0 * sp.energy(x, 1); };
  double q = 0.0;

  auto record = [&](double t) {
    for (std::size_t h = 0; h < sp.size(); ++h) {
      const cplx vh = w0[h] * std::exp(-sp.k2(h) * t);
      theta[h] = w[h] - vh;
      c[h] = vh;
    }
    tr.u.times.push_back(t);
    tr.v.times.push_back(t);
    const double eu = sp.energy(w, 0);
    tr.u.l2.push_back(std::sqrt(eu));
    tr.u.hdot1.push_back(std::sqrt(sp.energy(w, 1)));
    tr.u.hdot2.push_back(std::sqrt(sp.energy(w, 2)));
    tr.v.l2.push_back(std::sqrt(sp.energy(c, 0)));
    tr.v.hdot1.push_back(std::sqrt(sp.energy(c, 1)));
    tr.v.hdot2.push_back(std::sqrt(sp.energy(c, 2)));
    const bool late = t > 0.1 * horizon;
    tr.u.horizon_flag.push_back(late);
    tr.v.horizon_flag.push_back(late);
    tr.theta_l2.push_back(std::sqrt(sp.energy(theta, 0)));
    tr.energy.push_back(eu);
    tr.dissipation.push_back(q);
    std::vector<cplx> nl;
    const double umax = sp.nonlinear(w, nl);
    tr.skew.push_back(sp.skew(w, nl, umax));
    tr.max_div.push_back(sp.divergence(w));
  };

  double t = 0.0;
  record(0.0);
  std::vector<double> half(sp.size());
  const double dx = g.length() / g.resolution();
  for (double target : records) {
    while (t < target * (1.0 - 1e-14)) {
      const double umax = sp.nonlinear(w, k1);
      double dt = cfg.dt_growth > 0.0 ? std::min(cfg.dt_max, std::max(cfg.dt, cfg.dt_growth * t)) : cfg.dt;
      const double limit = umax > 0.0 ? cfg.cfl * dx / umax : std::numeric_limits<double>::infinity();
      if (dt > limit) {
        if (cfg.dt_growth == 0.0) {
          std::ostringstream msg;
          msg << "dt = " << dt << " violates the CFL bound " << limit << " at t = " << t;
          throw CFLViolation(msg.str());
        }
        dt = limit;
      }
      bool land = false;
      if (t + dt >= target * (1.0 - 1e-14)) {
        dt = target - t;
        land = true;
      }

      if (cfg.integrator == Integrator::if_rk4) {
#pragma omp parallel for schedule(static)
        for (std::size_t h = 0; h < sp.size(); ++h) half[h] = std::exp(-0.5 * sp.k2(h) * dt);
#pragma omp parallel for schedule(static)
        for (std::size_t h = 0; h < sp.size(); ++h) a[h] = half[h] * (w[h] + 0.5 * dt * k1[h]);
        sp.nonlinear(a, k2);
#pragma omp parallel for schedule(static)
        for (std::size_t h = 0; h < sp.size(); ++h) b[h] = half[h] * w[h] + 0.5 * dt * k2[h];
        sp.nonlinear(b, k3);
#pragma omp parallel for schedule(static)
        for (std::size_t h = 0; h < sp.size(); ++h) c[h] = half[h] * half[h] * w[h] + dt * half[h] * k3[h];
        sp.nonlinear(c, k4);
        q += dt / 6.0 * (dissipation(w) + 2.0 * dissipation(a) + 2.0 * dissipation(b) + dissipation(c));
#pragma omp parallel for schedule(static)
        for (std::size_t h = 0; h < sp.size(); ++h) {
          const double e1 = half[h], e2 = e1 * e1;
          w[h] = e2 * w[h] + dt / 6.0 * (e2 * k1[h] + 2.0 * e1 * (k2[h] + k3[h]) + k4[h]);
        }
      } else {
        const double d_old = dissipation(w);
#pragma omp parallel for schedule(static)
        for (std::size_t h = 0; h < sp.size(); ++h) w[h] = (w[h] + dt * k1[h]) / (1.0 + dt * sp.k2(h));
        q += 0.5 * dt * (d_old + dissipation(w));
      }
      t = land ? target : t + dt;
      ++tr.steps;
      check_finite(w, t);
      if (std::sqrt(sp.energy(w, 0)) > 10.0 * sqrt_e0) {
        std::ostringstream msg;
        msg << "energy grew beyond 10x its initial value at t = " << t;
        throw BlowupDetected(msg.str());
      }
    }
    record(target);
  }
  tr.final_state = sp.to_velocity(w);
  return tr;
}

// ---------------------------------------------------------------------------

EnergyAudit energy_audit(const SimTrace& trace, double tol) {
  EnergyAudit rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const std::size_t n = trace.energy.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double es = trace.energy[i];
      const double gap = es - trace.energy[j] - (trace.dissipation[j] - trace.dissipation[i]);
      const double rel = es > 0.0 ? gap / es : 0.0;
      rep.worst_margin = std::min(rep.worst_margin, rel);
      rep.equality_residual = std::max(rep.equality_residual, std::abs(rel));
      ++rep.pairs;
    }
  if (rep.pairs == 0) rep.worst_margin = 0.0;
  rep.inequality_holds = rep.worst_margin >= -tol;
  rep.equality_holds = rep.equality_residual <= tol;
  return rep;
}

SlopeFit fit_loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double t1, double t2) {
  std::vector<double> x, z;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t1 * (1.0 - 1e-12) || t[i] > t2 * (1.0 + 1e-12) || !(t[i] > 0.0) || !(y[i] > 0.0)) continue;
    x.push_back(std::log(t[i]));
    z.push_back(std::log(y[i]));
  }
  if (x.size() < 3 || (x.back() - x.front()) < std::log(10.0) * (1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "fewer than one decade of usable samples in [" << t1 << ", " << t2 << "]";
    throw WindowTooShort(msg.str());
  }
  double mx = 0.0, mz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    mz += z[i];
  }
  mx /= x.size();
  mz /= x.size();
  double sxx = 0.0, sxz = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxz += (x[i] - mx) * (z[i] - mz);
  }
  return {sxz / sxx, std::exp(x.front()), std::exp(x.back()), x.size()};
}

std::pair<double, double> default_fit_window(const SimTrace& trace) {
  if (trace.u.times.empty()) throw WindowTooShort("empty trace");
  const double t2 = trace.u.times.back();
  const double want = std::max(10.0, 0.1 * t2);
  // Start on a recorded time so the window spans at least a full decade.
  double t1 = want;
  for (double t : trace.u.times)
    if (t <= want * (1.0 + 1e-12) && t >= 10.0 * (1.0 - 1e-12)) t1 = t;
  return {t1, t2};
}

WiegnerReport wiegner_difference_check(const SimTrace& trace, double alpha,
                                       std::optional<std::pair<double, double>> window) {
  if (!(alpha > 0.0)) throw std::invalid_argument("wiegner_difference_check: alpha must be positive");
  const auto [t1, t2] = window ? *window : default_fit_window(trace);
  if (t1 < 10.0) throw WindowTooShort("fit window must start at t >= 10");
  WiegnerReport rep;
  rep.alpha = alpha;
  rep.target = -std::min(2.0 * alpha, 1.0);
  if (alpha < 0.5) {
    rep.tolerance = 0.05;
    rep.table_row = "0 < alpha < 1/2: O(t^{-2 alpha})";
  } else if (alpha == 0.5) {
    rep.tolerance = 0.1 + 1.0 / std::log(std::sqrt(t1 * t2));
    rep.table_row = "alpha = 1/2: O(t^{-1} log(2+t))";
  } else {
    rep.tolerance = 0.1;
    rep.table_row = alpha <= 1.0 ? "1/2 < alpha <= 1: O(t^{-1})" : "alpha > 1: O(t^{-1}) (beyond the transfer range)";
  }
  rep.u = fit_loglog_slope(trace.u.times, trace.u.l2, t1, t2);
  rep.v = fit_loglog_slope(trace.v.times, trace.v.l2, t1, t2);
  bool any = false;
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace.u.times[i] >= t1 && trace.u.times[i] <= t2 && trace.theta_l2[i] > 0.0) any = true;
  if (!any) {
    rep.exact_zero = true;
    rep.passes = true;
    return rep;
  }
  rep.theta = fit_loglog_slope(trace.u.times, trace.theta_l2, t1, t2);
  rep.passes = rep.theta.slope <= rep.target + rep.tolerance;
  return rep;
}

GradientReport gradient_decay_check(const SimTrace& trace, double alpha, std::optional<std::pair<double, double>> window,
                                    double tolerance) {
  const auto [t1, t2] = window ? *window : default_fit_window(trace);
  GradientReport rep;
  rep.alpha = alpha;
  rep.target = -(alpha + 0.5);
  rep.fit = fit_loglog_slope(trace.u.times, trace.u.hdot1, t1, t2);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.u.times[i];
    if (t < t1 || t > t2) continue;
    rep.sup_constant = std::max(rep.sup_constant, std::pow(1.0 + t, alpha) * std::sqrt(t) * trace.u.hdot1[i]);
  }
  rep.passes = std::isfinite(rep.sup_constant) && std::abs(rep.fit.slope - rep.target) <= tolerance;
  return rep;
}

LiminfReport liminf_check(const DecayProfile& p, double alpha, int l, std::pair<double, double> window,
                          double flat_tol) {
  if (l < 0 || l > 2) throw std::invalid_argument("liminf_check: l must be 0, 1 or 2");
  const auto& y = p.series(l);
  LiminfReport rep;
  rep.alpha = alpha;
  rep.l = l;
  std::vector<double> comp(p.size(), 0.0);
  rep.inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p.times[i];
    comp[i] = std::pow(t, alpha + 0.5 * l) * y[i];
    if (t < window.first * (1.0 - 1e-12) || t > window.second * (1.0 + 1e-12)) continue;
    rep.inf = std::min(rep.inf, comp[i]);
    rep.sup = std::max(rep.sup, comp[i]);
  }
  const SlopeFit f = fit_loglog_slope(p.times, comp, window.first, window.second);
  rep.trend = f.slope;
  rep.flatness = rep.inf > 0.0 ? rep.sup / rep.inf - 1.0 : std::numeric_limits<double>::infinity();
  rep.growing = rep.trend > 0.05;
  rep.certified = rep.inf > 0.0 && rep.flatness <= flat_tol;
  return rep;
}

void write_csv(std::ostream& out, const SimTrace& trace) {
  out << "t,l2_u,l2_v,theta,hdot1,hdot2,energy_residual\n" << std::setprecision(17);
  const double e0 = trace.energy.empty() ? 0.0 : trace.energy.front();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double res = e0 > 0.0 ? (trace.energy[i] + trace.dissipation[i] - e0) / e0 : 0.0;
    out << trace.u.times[i] << ',' << trace.u.l2[i] << ',' << trace.v.l2[i] << ',' << trace.theta_l2[i] << ','
        << trace.u.hdot1[i] << ',' << trace.u.hdot2[i] << ',' << res << '\n';
  }
}

void save_checkpoint(const std::string& path, const GridField& state) { save_grid_field(path, state); }

GridField load_checkpoint(const std::string& path) { return load_grid_field(path); }

}  // namespace specdecay
