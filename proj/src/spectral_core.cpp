#include "specdecay/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "specdecay/errors.hpp"

namespace specdecay {

double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

RadialProfile::RadialProfile(int dim, RootFn root, TailFn tail, double support_lo, double support_hi,
                             std::vector<double> breakpoints, nlohmann::json descriptor, int nodes_per_decade)
    : dim_(dim),
      root_(std::move(root)),
      tail_(std::move(tail)),
      lo_(support_lo),
      hi_(support_hi),
      breaks_(std::move(breakpoints)),
      descriptor_(std::move(descriptor)),
      nodes_per_decade_(nodes_per_decade) {
  if (dim_ < 2) throw std::invalid_argument("RadialProfile: dim must be >= 2");
  if (!(lo_ >= 0.0) || !(hi_ > lo_)) throw std::invalid_argument("RadialProfile: empty support");
  if (!std::isfinite(hi_)) throw std::invalid_argument("RadialProfile: support must be bounded above");
  if (nodes_per_decade_ < 16) throw std::invalid_argument("RadialProfile: need at least 16 nodes per decade");
  std::sort(breaks_.begin(), breaks_.end());
  breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
}

RadialProfile RadialProfile::with_nodes_per_decade(int nodes) const {
  RadialProfile p = *this;
  p.nodes_per_decade_ = nodes;
  if (nodes < 16) throw std::invalid_argument("RadialProfile: need at least 16 nodes per decade");
  p.descriptor_["nodes_per_decade"] = nodes;
  return p;
}

RadialProfile RadialProfile::with_descriptor(nlohmann::json descriptor) const {
  RadialProfile p = *this;
  p.descriptor_ = std::move(descriptor);
  return p;
}

namespace {

using Gauss16 = boost::math::quadrature::gauss<double, 16>;

// Full 16-point rule on [-1, 1] expanded from boost's symmetric half.
struct GaussRule {
  std::array<double, 16> x{}, w{};
  GaussRule() {
    const auto& a = Gauss16::abscissa();
    const auto& wt = Gauss16::weights();
    std::size_t i = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      x[i] = -a[k];
      w[i++] = wt[k];
      x[i] = a[k];
      w[i++] = wt[k];
    }
  }
};

const GaussRule& gauss_rule() {
  static const GaussRule rule;
  return rule;
}

// int_lo^hi f(r) dr in s = ln r, uniform panels.
template <class F>
double log_panels(double lo, double hi, int panels_per_decade, F&& f) {
  const double slo = std::log(lo), shi = std::log(hi);
  const int panels = std::max(1, static_cast<int>(std::ceil(std::log10(hi / lo) * panels_per_decade - 1e-9)));
  const double h = (shi - slo) / panels;
  const auto& g = gauss_rule();
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = slo + (p + 0.5) * h;
    double s = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double r = std::exp(mid + 0.5 * h * g.x[i]);
      s += g.w[i] * f(r) * r;
    }
    total += 0.5 * h * s;
  }
  return total;
}

double weight_at(const RadialWeight& w, double r) {
  double v = 1.0;
  const double r2 = r * r;
  for (int i = 0; i < w.power; ++i) v *= r2;
  if (w.heat_time != 0.0) v *= std::exp(-2.0 * w.heat_time * r2);
  if (w.extra) v *= w.extra(r);
  return v;
}

}  // namespace

QuadratureResult radial_integral(const RadialProfile& p, double a, double b, const RadialWeight& w, double rel_tol) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const int n = p.dim();
  const double omega = sphere_area(n);

  double qa = a;
  if (a == 0.0) {
    // [0, min(b, floor)] from the tail function
    const double top = std::min(b, kRadialFloor);
    const TailEstimate t = p.tail(top);
    if (w.power == 0) {
      const double damp = std::exp(-2.0 * w.heat_time * top * top);
      const double extra = w.extra ? w.extra(top) : 1.0;
      out.tail = omega * t.value * extra;
      out.tail_error = omega * (t.error + t.value * (1.0 - damp)) * std::abs(extra);
    } else {
      const double cap = std::pow(top, 2 * w.power) * (w.extra ? std::abs(w.extra(top)) : 1.0);
      out.tail = 0.5 * omega * t.value * cap;
      out.tail_error = 0.5 * omega * t.value * cap + omega * t.error * cap;
    }
    qa = top;
  }

  const double lo = std::max(qa, p.support_lo());
  const double hi = std::min(b, p.support_hi());
  double body = 0.0;
  if (hi > lo && lo > 0.0) {
    std::vector<double> cuts{lo};
    for (double br : p.breakpoints())
      if (br > lo && br < hi) cuts.push_back(br);
    cuts.push_back(hi);
    const int ppd = std::max(1, p.nodes_per_decade() / 16);
    auto integrand = [&](double r) { return p.amplitude(r) * weight_at(w, r) * std::pow(r, n - 1); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) body += log_panels(cuts[i], cuts[i + 1], ppd, integrand);
  } else if (hi > lo && lo == 0.0) {
    throw std::logic_error("radial_integral: quadrature interval touches the origin");
  }
  out.value = omega * body + out.tail;
  if (!std::isfinite(out.value) || out.tail_error > rel_tol * std::abs(out.value) + 1e-300) {
    std::ostringstream msg;
    msg << "radial integral on [" << a << ", " << b << "] failed its tail check: tail error " << out.tail_error
        << " vs value " << out.value;
    throw QuadratureDivergence(msg.str());
  }
  return out;
}

RadialProfile combine(const RadialProfile& f, double a, const RadialProfile& g, double b) {
  if (f.dim() != g.dim()) throw std::invalid_argument("combine: dimension mismatch");
  auto fr = f.root_fn();
  auto gr = g.root_fn();
  const double flo = f.support_lo(), fhi = f.support_hi(), glo = g.support_lo(), ghi = g.support_hi();
  auto root = [=](double r) {
    const double x = (r < flo || r > fhi) ? 0.0 : fr(r);
    const double y = (r < glo || r > ghi) ? 0.0 : gr(r);
    return a * x + b * y;
  };
  auto ft = f.tail_fn();
  auto gt = g.tail_fn();
  auto tail = [=](double r) {
    const TailEstimate x = ft(r), y = gt(r);
    const double sx = std::sqrt(std::max(x.value, 0.0)), sy = std::sqrt(std::max(y.value, 0.0));
    const double v = (a * sx + b * sy) * (a * sx + b * sy);
    // Cauchy-Schwarz: the cross term is at most 2|ab| sqrt(Tf Tg)
    return TailEstimate{v, 2.0 * std::abs(a * b) * sx * sy + a * a * x.error + b * b * y.error};
  };
  std::vector<double> br = f.breakpoints();
  br.insert(br.end(), g.breakpoints().begin(), g.breakpoints().end());
  br.push_back(flo);
  br.push_back(fhi);
  br.push_back(glo);
  br.push_back(ghi);
  nlohmann::json d = {{"kind", "combination"}, {"a", a}, {"f", f.descriptor()}, {"b", b}, {"g", g.descriptor()}};
  return RadialProfile(f.dim(), root, tail, std::min(flo, glo), std::max(fhi, ghi), br, d,
                       std::max(f.nodes_per_decade(), g.nodes_per_decade()));
}

RadialProfile scaled(const RadialProfile& f, double lambda) {
  auto fr = f.root_fn();
  auto ft = f.tail_fn();
  nlohmann::json d = f.descriptor();
  d["scale"] = d.value("scale", 1.0) * lambda;
  return RadialProfile(
      f.dim(), [=](double r) { return lambda * fr(r); },
      [=](double r) {
        auto t = ft(r);
        return TailEstimate{lambda * lambda * t.value, lambda * lambda * t.error};
      },
      f.support_lo(), f.support_hi(), f.breakpoints(), d, f.nodes_per_decade());
}

// ---------------------------------------------------------------------------

double sobolev_energy(const GridField& f, int l) {
  return kernels::omp::weighted_energy(f.grid(), f.coeffs(), {.power = l});
}

double sobolev_energy(const RadialProfile& f, int l) {
  return radial_integral(f, 0.0, std::numeric_limits<double>::infinity(), {.power = l}).value;
}

FieldNorms norms(const GridField& f) {
  return {std::sqrt(sobolev_energy(f, 0)), {std::sqrt(sobolev_energy(f, 1)), std::sqrt(sobolev_energy(f, 2))}};
}

FieldNorms norms(const RadialProfile& f) {
  return {std::sqrt(sobolev_energy(f, 0)), {std::sqrt(sobolev_energy(f, 1)), std::sqrt(sobolev_energy(f, 2))}};
}

FieldNorms norms(const Field& f) {
  return std::visit([](const auto& x) { return norms(x); }, f);
}

double low_freq_mass(const RadialProfile& f, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("low_freq_mass: rho must be positive");
  return radial_integral(f, 0.0, rho).value;
}

double low_freq_mass(const GridField& f, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("low_freq_mass: rho must be positive");
  const double k0 = f.grid().k0();
  if (rho < 2.0 * k0) {
    std::ostringstream msg;
    msg << "low_freq_mass: rho = " << rho << " is below the lattice resolution 2 k0 = " << 2.0 * k0;
    throw MassUnresolvable(msg.str());
  }
  // sharp ball |k| <= rho; nextafter turns the half-open kernel range into a closed one
  return kernels::omp::weighted_energy(f.grid(), f.coeffs(), {.r_lo = 0.0, .r_hi = std::nextafter(rho, INFINITY)});
}

GridField leray_project(const GridField& f) {
  return GridField(f.grid(), kernels::omp::leray_project(f.grid(), f.coeffs()));
}

GridField sample_on_grid(const RadialProfile& f, const Grid& grid, const std::vector<std::array<double, 3>>& centers) {
  if (f.dim() != grid.dim()) throw std::invalid_argument("sample_on_grid: dimension mismatch");
  const int dim = grid.dim();
  const double pref = std::sqrt(0.5 * dim);
  std::vector<cplx> c(grid.points() * dim);
#pragma omp parallel for schedule(static)
  for (std::size_t p = 1; p < grid.points(); ++p) {
    if (grid.is_nyquist(p)) continue;
    const auto k = grid.wavevector(p);
    const double kk = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    const double s = f.root(kk);
    if (s == 0.0) continue;
    cplx phase = 0.0;
    for (const auto& x : centers) phase += std::polar(1.0, -(k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
    const cplx amp = pref * s / kk * phase;
    c[p * dim + 0] = amp * cplx(0.0, -k[1]);
    c[p * dim + 1] = amp * cplx(0.0, k[0]);
  }
  return GridField(grid, std::move(c));
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'D', 'G', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304u;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, bool swap) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("grid field container truncated");
  if (swap) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

}  // namespace

void write_grid_field(std::ostream& out, const GridField& f) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, kEndianTag);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().resolution()));
  put<std::uint32_t>(out, 0u);
  put<double>(out, f.grid().length());
  for (const cplx& c : f.coeffs()) {
    put<double>(out, c.real());
    put<double>(out, c.imag());
  }
  if (!out) throw FormatError("failed writing grid field container");
}

GridField read_grid_field(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("not a grid field container (bad magic)");
  std::uint32_t version;
  in.read(reinterpret_cast<char*>(&version), 4);
  std::uint32_t tag = get<std::uint32_t>(in, false);
  bool swap = false;
  if (tag != kEndianTag) {
    if (__builtin_bswap32(tag) != kEndianTag) throw FormatError("grid field container: bad endianness tag");
    swap = true;
    version = __builtin_bswap32(version);
  }
  if (version != kVersion) throw FormatError("grid field container: unsupported version " + std::to_string(version));
  const auto dim = get<std::uint32_t>(in, swap);
  const auto n = get<std::uint32_t>(in, swap);
  get<std::uint32_t>(in, swap);
  const double length = get<double>(in, swap);
  Grid grid(static_cast<int>(dim), length, static_cast<int>(n));
  std::vector<cplx> c(grid.points() * dim);
  for (auto& v : c) {
    const double re = get<double>(in, swap);
    const double im = get<double>(in, swap);
    v = cplx(re, im);
  }
  return GridField(grid, std::move(c));
}

void save_grid_field(const std::string& path, const GridField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_grid_field(out, f);
}

GridField load_grid_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_grid_field(in);
}

nlohmann::json to_json(const RadialProfile& f) {
  nlohmann::json d = f.descriptor();
  d["dim"] = f.dim();
  d["nodes_per_decade"] = f.nodes_per_decade();
  return d;
}

}  // namespace specdecay
