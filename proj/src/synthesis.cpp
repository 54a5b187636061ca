#include "specdecay/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "specdecay/errors.hpp"
#include "specdecay/heat_flow.hpp"

namespace specdecay {

namespace {

double pow2(int j) { return std::ldexp(1.0, j); }

void check_dim(int n) {
  if (n < 2) throw std::invalid_argument("synthesis: dimension must be >= 2");
}

}  // namespace

RadialProfile make_zero_profile(int n) {
  check_dim(n);
  return RadialProfile(
      n, [](double) { return 0.0; }, [](double) { return TailEstimate{}; }, 0.0, 1.0, {},
      {{"kind", "zero"}, {"dim", n}});
}

RadialProfile make_power_law(int n, double kappa, double cutoff) {
  check_dim(n);
  if (kappa <= -0.5 * n) {
    std::ostringstream msg;
    msg << "power law with kappa = " << kappa << " has infinite energy near 0 in dimension " << n;
    throw InfiniteEnergy(msg.str());
  }
  if (!(cutoff > 0.0)) throw std::invalid_argument("make_power_law: cutoff must be positive");
  const double m = 2.0 * kappa + n;
  return RadialProfile(
      n, [kappa](double r) { return std::pow(r, kappa); },
      [m, cutoff](double r) {
        const double x = std::min(r, cutoff);
        return TailEstimate{std::pow(x, m) / m, 0.0};
      },
      0.0, cutoff, {cutoff}, {{"kind", "power_law"}, {"dim", n}, {"kappa", kappa}, {"cutoff", cutoff}});
}

RadialProfile make_log_counterexample(int n) {
  check_dim(n);
  const double half_n = 0.5 * n;
  return RadialProfile(
      n, [half_n](double r) { return std::pow(r, -half_n) / std::log(r); },
      [](double r) {
        const double x = std::min(r, 0.5);
        return TailEstimate{1.0 / std::abs(std::log(x)), 0.0};
      },
      0.0, 0.5, {0.5}, {{"kind", "log_counterexample"}, {"dim", n}});
}

RadialProfile make_gaussian_swirl(int n) {
  check_dim(n);
  const double m = n + 2.0;
  return RadialProfile(
      n, [](double r) { return r * std::exp(-0.5 * r * r); },
      [m](double r) {
        // e^{-r^2} >= 1 - r^2 on the tail interval
        const double v = std::pow(r, m) / m;
        return TailEstimate{v, v * r * r};
      },
      0.0, 40.0, {}, {{"kind", "gaussian_swirl"}, {"dim", n}});
}

RadialProfile make_band_limited(int n, double r_lo, double r_hi, double kappa) {
  check_dim(n);
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw std::invalid_argument("make_band_limited: need 0 < r_lo < r_hi");
  const double m = 2.0 * kappa + n;
  return RadialProfile(
      n, [kappa](double r) { return std::pow(r, kappa); },
      [=](double r) {
        if (r <= r_lo) return TailEstimate{};
        return TailEstimate{(std::pow(std::min(r, r_hi), m) - std::pow(r_lo, m)) / m, 0.0};
      },
      r_lo, r_hi, {r_lo, r_hi},
      {{"kind", "band_limited"}, {"dim", n}, {"r_lo", r_lo}, {"r_hi", r_hi}, {"kappa", kappa}});
}

RadialProfile make_tabulated(int n, std::vector<double> r, std::vector<double> amplitude) {
  check_dim(n);
  if (r.size() != amplitude.size() || r.size() < 2)
    throw std::invalid_argument("make_tabulated: need at least two (r, A) pairs of equal length");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || !(amplitude[i] > 0.0))
      throw std::invalid_argument("make_tabulated: radii and amplitudes must be positive");
    if (i > 0 && !(r[i] > r[i - 1])) throw std::invalid_argument("make_tabulated: radii must increase");
  }
  std::vector<double> lr(r.size()), la(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    lr[i] = std::log(r[i]);
    la[i] = std::log(amplitude[i]);
  }
  const double p = (la[1] - la[0]) / (lr[1] - lr[0]);
  const double r0 = r.front(), a0 = amplitude.front();
  auto root = [lr, la, p, r0, a0](double x) {
    if (x <= r0) return std::sqrt(a0 * std::pow(x / r0, p));
    const double lx = std::log(x);
    const auto it = std::upper_bound(lr.begin(), lr.end(), lx);
    if (it == lr.end()) return std::sqrt(std::exp(la.back()));
    const std::size_t i = static_cast<std::size_t>(it - lr.begin());
    const double w = (lx - lr[i - 1]) / (lr[i] - lr[i - 1]);
    return std::exp(0.5 * ((1.0 - w) * la[i - 1] + w * la[i]));
  };
  auto tail = [p, r0, a0, n](double x) {
    const double e = p + n;
    if (e <= 0.0)
      throw QuadratureDivergence("tabulated profile: extrapolated power law is not integrable at 0");
    const double v = a0 * std::pow(r0, -p) * std::pow(x, e) / e;
    return TailEstimate{v, v};
  };
  nlohmann::json d = {{"kind", "tabulated"}, {"dim", n}, {"r", r}, {"A", amplitude}};
  return RadialProfile(n, root, tail, 0.0, r.back(), r, d);
}

RadialProfile profile_from_json(const nlohmann::json& d) {
  try {
    if (!d.is_object() || !d.contains("kind")) throw ConfigInvalid("profile descriptor needs a \"kind\"");
    const std::string kind = d.at("kind").get<std::string>();
    const int n = d.value("dim", 2);
    std::optional<RadialProfile> p;
    if (kind == "zero") {
      p = make_zero_profile(n);
    } else if (kind == "power_law") {
      p = make_power_law(n, d.at("kappa").get<double>(), d.value("cutoff", 1.0));
    } else if (kind == "log_counterexample") {
      p = make_log_counterexample(n);
    } else if (kind == "gaussian_swirl") {
      p = make_gaussian_swirl(n);
    } else if (kind == "band_limited") {
      p = make_band_limited(n, d.at("r_lo").get<double>(), d.at("r_hi").get<double>(), d.value("kappa", 0.0));
    } else if (kind == "tabulated") {
      p = make_tabulated(n, d.at("r").get<std::vector<double>>(), d.at("A").get<std::vector<double>>());
    } else if (kind == "combination") {
      p = combine(profile_from_json(d.at("f")), d.at("a").get<double>(), profile_from_json(d.at("g")),
                  d.at("b").get<double>());
    } else if (kind == "v_alpha_perturbation") {
      const std::string mode = d.value("normalization", "unit");
      p = make_v_alpha_perturbation(profile_from_json(d.at("source")), d.at("alpha").get<double>(),
                                    d.at("epsilon").get<double>(), d.at("j0").get<int>(), -40,
                                    mode == "literal" ? ShellNormalization::literal : ShellNormalization::unit)
              .w;
    } else {
      throw ConfigInvalid("unknown profile kind \"" + kind + "\"");
    }
    if (d.contains("scale")) p = scaled(*p, d.at("scale").get<double>());
    if (d.contains("heat_time")) p = heat_evolve(*p, d.at("heat_time").get<double>());
    if (d.contains("nodes_per_decade")) p = p->with_nodes_per_decade(d.at("nodes_per_decade").get<int>());
    return p->with_descriptor(d);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("bad profile descriptor: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigInvalid(std::string("bad profile descriptor: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

double shell_constant(int n, ShellNormalization mode) {
  if (mode == ShellNormalization::unit) return 1.0;
  return std::sqrt(2.0 * sphere_area(n) * (std::exp2(n) - 1.0) / (double(n) * n));
}

namespace {

constexpr int kDeepest = -60;
constexpr double kLowerTol = 1e-10;

void finish_report(PerturbationReport& rep) {
  rep.min_w_ratio = std::numeric_limits<double>::infinity();
  rep.max_distance_ratio = 0.0;
  for (const auto& row : rep.rows) {
    rep.min_w_ratio = std::min(rep.min_w_ratio, row.w_ratio);
    rep.max_distance_ratio = std::max(rep.max_distance_ratio, row.distance_ratio);
  }
  rep.lower_bound_holds = rep.min_w_ratio >= rep.c_lower * rep.epsilon * (1.0 - kLowerTol);
  rep.distance_holds = rep.max_distance_ratio <= 2.0 * rep.epsilon;
}

PerturbationReport blank_report(int n, double alpha, double epsilon, int j0, ShellNormalization mode) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("make_v_alpha_perturbation: epsilon must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("make_v_alpha_perturbation: alpha must be positive");
  PerturbationReport rep;
  rep.alpha = alpha;
  rep.epsilon = epsilon;
  rep.j0 = j0;
  rep.normalization = mode;
  rep.c_n = shell_constant(n, mode);
  rep.c_lower = std::min(1.0, rep.c_n);
  return rep;
}

}  // namespace

RadialPerturbation make_v_alpha_perturbation(const RadialProfile& u0, double alpha, double epsilon, int j0,
                                             int report_j_min, ShellNormalization mode) {
  const int n = u0.dim();
  PerturbationReport rep = blank_report(n, alpha, epsilon, j0, mode);
  if (j0 <= kDeepest) throw std::invalid_argument("make_v_alpha_perturbation: j0 too deep");
  const double omega = sphere_area(n);

  // decision per block j in [kDeepest, j0]
  const int count = j0 - kDeepest + 1;
  std::vector<char> keep(count);
  std::vector<double> source_mass(count);
  for (int j = kDeepest; j <= j0; ++j) {
    const double e = radial_integral(u0, pow2(j), pow2(j + 1)).value;
    source_mass[j - kDeepest] = e;
    keep[j - kDeepest] = std::exp2(-2.0 * alpha * j) * std::sqrt(e) >= epsilon;
  }

  // shell amplitude A_j and full-block mass without the sphere factor
  const double K = mode == ShellNormalization::unit ? epsilon * epsilon / omega
                                                    : (2.0 / n) * epsilon * epsilon * (std::exp2(n) - 1.0) / n;
  auto shell_amp = [=](int j) {
    if (mode == ShellNormalization::unit)
      return n * epsilon * epsilon * std::exp2(4.0 * alpha * j) / (omega * std::exp2(j * n) * (std::exp2(n) - 1.0));
    return (2.0 / n) * epsilon * epsilon * std::exp2((4.0 * alpha - n) * j);
  };
  auto decide = [keep](int j) { return keep[std::max(j, kDeepest) - kDeepest] != 0; };
  auto block_of = [](double r) { return kernels::dyadic_index(r * r); };

  auto src_root = u0.root_fn();
  const double src_lo = u0.support_lo(), src_hi = u0.support_hi();
  auto source_root = [=](double r) { return (r < src_lo || r > src_hi) ? 0.0 : src_root(r); };
  const double top = pow2(j0 + 1);
  auto root = [=](double r) {
    if (r >= top) return source_root(r);
    const int j = block_of(r);
    return decide(j) ? source_root(r) : std::sqrt(shell_amp(j));
  };

  auto src_tail = u0.tail_fn();
  auto tail = [=](double r) {
    TailEstimate out;
    int j = block_of(r);
    if (j < kDeepest) {
      if (decide(kDeepest)) return src_tail(r);
      out.value = shell_amp(j) * (std::pow(r, n) - std::exp2(j * n)) / n + K * std::exp2(4.0 * alpha * j) /
                                                                                (std::exp2(4.0 * alpha) - 1.0);
      return out;
    }
    // partial block j, then full blocks down to kDeepest, then the deep remainder
    if (decide(j)) {
      const TailEstimate hi = src_tail(r), lo = src_tail(pow2(j));
      out.value += hi.value - lo.value;
      out.error += hi.error + lo.error;
    } else {
      out.value += shell_amp(j) * (std::pow(r, n) - std::exp2(j * n)) / n;
    }
    for (int i = j - 1; i >= kDeepest; --i)
      out.value += decide(i) ? source_mass[i - kDeepest] / omega : K * std::exp2(4.0 * alpha * i);
    if (decide(kDeepest)) {
      const TailEstimate deep = src_tail(pow2(kDeepest));
      out.value += deep.value;
      out.error += deep.error;
    } else {
      out.value += K * std::exp2(4.0 * alpha * kDeepest) / (std::exp2(4.0 * alpha) - 1.0);
    }
    return out;
  };

  std::vector<double> br = u0.breakpoints();
  for (int j = kDeepest; j <= j0 + 1; ++j) br.push_back(pow2(j));
  nlohmann::json d = {{"kind", "v_alpha_perturbation"},
                      {"dim", n},
                      {"source", u0.descriptor()},
                      {"alpha", alpha},
                      {"epsilon", epsilon},
                      {"j0", j0},
                      {"normalization", mode == ShellNormalization::unit ? "unit" : "literal"}};
  RadialProfile w(n, root, tail, 0.0, std::max(src_hi, top), br, d, u0.nodes_per_decade());

  const RadialProfile diff = combine(u0, 1.0, w, -1.0);
  for (int j = std::max(report_j_min, kDeepest); j <= j0; ++j) {
    const double scale = std::exp2(-2.0 * alpha * j);
    PerturbationRow row;
    row.j = j;
    row.kept = decide(j);
    row.source_ratio = scale * std::sqrt(source_mass[j - kDeepest]);
    row.w_ratio = scale * std::sqrt(radial_integral(w, pow2(j), pow2(j + 1)).value);
    row.distance_ratio = scale * std::sqrt(radial_integral(diff, pow2(j), pow2(j + 1)).value);
    rep.rows.push_back(row);
  }
  finish_report(rep);
  return {std::move(w), std::move(rep)};
}

GridPerturbation make_v_alpha_perturbation(const GridField& u0, double alpha, double epsilon, int j0,
                                           ShellNormalization mode) {
  const Grid& g = u0.grid();
  const int n = g.dim();
  PerturbationReport rep = blank_report(n, alpha, epsilon, j0, mode);
  const int j_low = kernels::dyadic_index(g.k0() * g.k0());
  if (j0 < j_low) throw WindowUnresolvable("make_v_alpha_perturbation: j0 below the lattice");
  const int nb = j0 - j_low + 1;
  const auto src = kernels::omp::shell_energies(g, u0.coeffs(), j_low, j0);

  std::vector<char> keep(nb);
  for (int j = j_low; j <= j0; ++j)
    keep[j - j_low] = std::exp2(-2.0 * alpha * j) * std::sqrt(src[j - j_low]) >= epsilon;

  // lattice mass of the unit-amplitude swirl on each replaced block
  std::vector<double> unit_mass(nb, 0.0);
  for (std::size_t p = 1; p < g.points(); ++p) {
    if (g.is_nyquist(p)) continue;
    const double k2 = g.wavenumber_sq(p);
    const int j = kernels::dyadic_index(k2);
    if (j > j0) continue;
    const auto k = g.wavevector(p);
    unit_mass[j - j_low] += (k[0] * k[0] + k[1] * k[1]) / k2;
  }
  std::vector<double> amp(nb, 0.0);
  for (int j = j_low; j <= j0; ++j) {
    const int b = j - j_low;
    if (keep[b]) continue;
    if (mode == ShellNormalization::unit) {
      const double m = unit_mass[b] * g.cell_measure();
      amp[b] = m > 0.0 ? epsilon * std::exp2(2.0 * alpha * j) / std::sqrt(m) : 0.0;
    } else {
      amp[b] = epsilon * std::exp2((2.0 * alpha - 0.5 * n) * j);
    }
  }

  std::vector<cplx> c(u0.coeffs().begin(), u0.coeffs().end());
#pragma omp parallel for schedule(static)
  for (std::size_t p = 1; p < g.points(); ++p) {
    const double k2 = g.wavenumber_sq(p);
    const int j = kernels::dyadic_index(k2);
    if (j > j0 || keep[j - j_low]) continue;
    cplx* cp = c.data() + p * n;
    for (int d = 0; d < n; ++d) cp[d] = 0.0;
    if (g.is_nyquist(p)) continue;
    const auto k = g.wavevector(p);
    const double a = amp[j - j_low] / std::sqrt(k2);
    cp[0] = cplx(0.0, -a * k[1]);
    cp[1] = cplx(0.0, a * k[0]);
  }
  GridField w(g, std::move(c));

  const auto wb = kernels::omp::shell_energies(g, w.coeffs(), j_low, j0);
  const GridField diff = difference(u0, w);
  const auto db = kernels::omp::shell_energies(g, diff.coeffs(), j_low, j0);
  for (int j = j_low; j <= j0; ++j) {
    if (pow2(j) < 2.0 * g.k0()) continue;
    const double scale = std::exp2(-2.0 * alpha * j);
    const int b = j - j_low;
    rep.rows.push_back({j, keep[b] != 0, scale * std::sqrt(src[b]), scale * std::sqrt(wb[b]),
                        scale * std::sqrt(db[b])});
  }
  finish_report(rep);
  return {std::move(w), std::move(rep)};
}

// ---------------------------------------------------------------------------

GridField make_random_div_free(const Grid& grid, std::uint64_t seed, const std::function<double(double)>& envelope,
                               RandomMode mode) {
  const int dim = grid.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> c(grid.points() * dim);
  for (std::size_t p = 1; p < grid.points(); ++p) {
    if (grid.is_nyquist(p)) continue;
    const std::size_t q = grid.mirror(p);
    if (q < p) continue;
    for (int d = 0; d < dim; ++d) {
      const double re = normal(rng);
      const double im = normal(rng);
      c[p * dim + d] = cplx(re, im);
      c[q * dim + d] = cplx(re, -im);
    }
  }
  c = kernels::omp::leray_project(grid, c);
  const double gauss_norm = 1.0 / std::sqrt(2.0 * (dim - 1));
  int bad_envelope = 0;
#pragma omp parallel for schedule(static) reduction(| : bad_envelope)
  for (std::size_t p = 1; p < grid.points(); ++p) {
    cplx* cp = c.data() + p * dim;
    const double env = envelope(std::sqrt(grid.wavenumber_sq(p)));
    if (!(env >= 0.0) || !std::isfinite(env)) {
      bad_envelope = 1;
      continue;
    }
    double scale = 0.0;
    if (mode == RandomMode::random_phase) {
      double mag2 = 0.0;
      for (int d = 0; d < dim; ++d) mag2 += std::norm(cp[d]);
      scale = mag2 > 0.0 ? std::sqrt(env / mag2) : 0.0;
    } else {
      scale = std::sqrt(env) * gauss_norm;
    }
    for (int d = 0; d < dim; ++d) cp[d] *= scale;
  }
  if (bad_envelope) throw std::invalid_argument("make_random_div_free: envelope must be finite and nonnegative");
  return GridField(grid, std::move(c));
}

}  // namespace specdecay
