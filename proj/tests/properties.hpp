#pragma once

// Seeded property corpus shared by the unit suite and the acceptance binary.
// Each property draws its parameters from mt19937_64(seed) and returns a
// description of the first failing case, or an empty string.

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "specdecay/heat_flow.hpp"
#include "specdecay/kernels.hpp"
#include "specdecay/littlewood_paley.hpp"
#include "specdecay/synthesis.hpp"
#include "support.hpp"

namespace testing::props {

inline constexpr int kCases = 50;

struct Case {
  std::mt19937_64 rng;
  explicit Case(std::uint64_t seed) : rng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int pick(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
  specdecay::Grid grid() {
    const int d = pick(2, 3);
    const int n = d == 2 ? (pick(0, 1) ? 32 : 16) : 16;
    return specdecay::Grid(d, uniform(2.0, 50.0), n);
  }
};

inline std::string fail(const char* what, std::uint64_t seed, double value) {
  std::ostringstream s;
  s << what << " (seed " << seed << "): " << value;
  return s.str();
}

inline std::string leray_projector(std::uint64_t seed) {
  Case c(seed);
  const auto f = random_field(c.grid(), static_cast<unsigned>(seed));
  const auto p1 = specdecay::leray_project(f);
  const auto p2 = specdecay::leray_project(p1);
  const double idem = specdecay::norms(specdecay::difference(p1, p2)).l2 / specdecay::norms(p1).l2;
  if (idem > 1e-14) return fail("P^2 != P", seed, idem);
  if (specdecay::divergence_defect(p1) > 1e-13) return fail("P u not divergence-free", seed, specdecay::divergence_defect(p1));
  // Orthogonal projection: ||P u|| <= ||u||.
  if (specdecay::norms(p1).l2 > specdecay::norms(f).l2 * (1 + 1e-14)) return fail("P expands", seed, specdecay::norms(p1).l2);
  return {};
}

inline std::string plancherel(std::uint64_t seed) {
  Case c(seed);
  const auto f = random_field(c.grid(), static_cast<unsigned>(seed));
  const double spec = specdecay::norms(f).l2;
  const double phys = specdecay::physical_lp_norm(f, 2.0);
  const double r = rel(phys, spec);
  return r > 1e-12 ? fail("physical and spectral L2 differ", seed, r) : std::string{};
}

inline std::string semigroup(std::uint64_t seed) {
  Case c(seed);
  const auto g = c.grid();
  const auto f = random_field(g, static_cast<unsigned>(seed));
  const double s = c.uniform(0.0, 2.0) / (g.k0() * g.k0()), t = c.uniform(0.0, 2.0) / (g.k0() * g.k0());
  const auto a = specdecay::heat_evolve(specdecay::heat_evolve(f, s), t);
  const auto b = specdecay::heat_evolve(f, s + t);
  const double d = specdecay::norms(specdecay::difference(a, b)).l2 / std::max(specdecay::norms(b).l2, 1e-300);
  if (d > 1e-13) return fail("e^{s Delta} e^{t Delta} != e^{(s+t) Delta}", seed, d);
  const double grow = specdecay::norms(a).l2 / specdecay::norms(f).l2;
  return grow > 1.0 ? fail("heat flow increased the norm", seed, grow) : std::string{};
}

inline std::string block_mass(std::uint64_t seed) {
  Case c(seed);
  const auto g = c.grid();
  const auto f = random_field(g, static_cast<unsigned>(seed));
  const int j_lo = static_cast<int>(std::ceil(std::log2(2 * g.k0())));
  const int j_top = static_cast<int>(std::floor(std::log2(g.k0() * g.max_index())));
  const int j_hi = std::min(j_lo + c.pick(0, 3), j_top);
  const auto s = specdecay::dyadic_blocks(f, j_lo, j_hi);
  const double total = specdecay::sobolev_energy(f, 0);
  const double r = rel(s.total_mass(), total);
  return r > 1e-12 ? fail("block masses do not add up", seed, r) : std::string{};
}

inline std::string scaling(std::uint64_t seed) {
  Case c(seed);
  const int n = c.pick(2, 3);
  const double kappa = c.uniform(-0.5 * n + 0.2, 2.0);
  const double sigma = kappa + 0.5 * n;
  const auto p = specdecay::make_power_law(n, kappa, 1.0);
  const double t = c.uniform(1e3, 1e5);
  const double ratio = specdecay::sobolev_energy(specdecay::heat_evolve(p, 4 * t), 0) /
                       specdecay::sobolev_energy(specdecay::heat_evolve(p, t), 0);
  const double r = rel(ratio, std::pow(4.0, -sigma));
  if (r > 1e-8) return fail("heat energy is not homogeneous of degree -sigma", seed, r);
  const double lam = c.uniform(-3.0, 3.0);
  const auto f = random_field(c.grid(), static_cast<unsigned>(seed));
  const double rs = rel(specdecay::norms(specdecay::scaled(f, lam)).l2, std::abs(lam) * specdecay::norms(f).l2);
  return rs > 1e-14 ? fail("norm is not absolutely homogeneous", seed, rs) : std::string{};
}

inline std::string determinism(std::uint64_t seed) {
  Case c(seed);
  const auto g = c.grid();
  auto env = [](double k) { return std::exp(-k * k); };
  const auto a = specdecay::make_random_div_free(g, seed, env);
  const auto b = specdecay::make_random_div_free(g, seed, env);
  if (std::memcmp(a.coeffs().data(), b.coeffs().data(), a.coeffs().size_bytes()) != 0)
    return fail("same seed, different field", seed, 0.0);
  namespace k = specdecay::kernels;
  const k::SpectralWeight w{c.pick(0, 2), c.uniform(0.0, 1.0), 0.0, 1e300};
  const double es = k::serial::weighted_energy(g, a.coeffs(), w), eo = k::omp::weighted_energy(g, a.coeffs(), w);
  const double r = rel(eo, es);
  return r > 1e-13 ? fail("serial and OpenMP energies differ", seed, r) : std::string{};
}

using Property = std::string (*)(std::uint64_t);

struct Named {
  const char* name;
  Property run;
};

inline constexpr Named kAll[] = {{"leray_projector", leray_projector}, {"plancherel", plancherel},
                                 {"semigroup", semigroup},             {"block_mass", block_mass},
                                 {"scaling", scaling},                 {"determinism", determinism}};

/// Runs kCases seeds of one property; returns the first failure.
inline std::string run_corpus(Property p, std::uint64_t base = 0x5eed) {
  for (int i = 0; i < kCases; ++i)
    if (auto msg = p(base + static_cast<std::uint64_t>(i)); !msg.empty()) return msg;
  return {};
}

}  // namespace testing::props
