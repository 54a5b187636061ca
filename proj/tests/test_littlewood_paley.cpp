#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "specdecay/errors.hpp"
#include "specdecay/littlewood_paley.hpp"
#include "specdecay/synthesis.hpp"
#include "support.hpp"

using namespace specdecay;
using testing::rel;
constexpr double pi = std::numbers::pi;

namespace {
// 2 pi int_{2^j}^{2^{j+1}} r^{2k+1} dr for n = 2
double power_block(int j, double k) {
  const double e = 2 * k + 2;
  return 2 * pi * (std::pow(2.0, (j + 1) * e) - std::pow(2.0, j * e)) / e;
}
}  // namespace

TEST_SUITE("littlewood_paley") {
  TEST_CASE("sharp blocks of a power law") {
    const double k = 0.5;
    const auto s = dyadic_blocks(make_power_law(2, k, 1.0), -20, -1);
    for (int j = -20; j <= -1; ++j) CHECK(rel(s.energy(j), power_block(j, k)) < 1e-11);
    CHECK(rel(s.mass_below, 2 * pi * std::pow(2.0, -20 * 3.0) / 3.0) < 1e-10);
    CHECK(s.mass_above == doctest::Approx(0.0).epsilon(1e-14));
  }

  TEST_CASE("log counterexample blocks are (2 pi / ln 2) / (j (j + 1))") {
    // int dr / (r ln^2 r) = -1 / ln r between 2^j and 2^{j+1}
    const auto s = dyadic_blocks(make_log_counterexample(2), -30, -2);
    for (int j = -30; j <= -2; ++j) CHECK(rel(s.energy(j), 2 * pi / std::log(2.0) / (double(j) * (j + 1))) < 1e-9);
  }

  TEST_CASE("smooth cutoff telescopes to one") {
    CHECK(smooth_cutoff(0.5) == 1.0);
    CHECK(smooth_cutoff(1.5) == 0.0);
    for (double r : {0.01, 0.3, 1.0, 2.7, 11.0}) {
      double sum = 0.0;
      for (int j = -20; j <= 10; ++j) sum += smooth_block_weight(r, j);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(smooth_block_weight(1.0, 3) == 0.0);
  }

  TEST_CASE("block mass accounting, sharp and smooth, radial and grid") {
    const auto p = make_gaussian_swirl(2);
    const double total = sobolev_energy(p, 0);
    const auto sharp = dyadic_blocks(p, -12, 4);
    CHECK(rel(sharp.total_mass(), total) < 1e-10);

    const Grid g(2, 2 * pi / 0.05, 256);
    const auto f = sample_on_grid(p, g);
    const double tf = sobolev_energy(f, 0);
    const auto gs = dyadic_blocks(f, -3, 2);
    CHECK(rel(gs.total_mass(), tf) < 1e-12);
    // Smooth blocks over a window that covers the support of |u^|^2 sum phi_j^2 <= 1.
    const auto sm = dyadic_blocks(f, -3, 2, BlockMode::smooth);
    CHECK(sm.window_mass() <= tf * (1 + 1e-12));
    CHECK(sm.window_mass() > 0.5 * tf);
  }

  TEST_CASE("grid windows below the lattice are rejected") {
    const Grid g(2, 2 * pi, 32);  // k0 = 1
    const auto f = testing::random_field(g, 1);
    CHECK_THROWS_AS(dyadic_blocks(f, 0, 2), WindowUnresolvable);
    CHECK_NOTHROW(dyadic_blocks(f, 1, 3));
  }

  TEST_CASE("besov seminorm: flat at the right index, divergent above") {
    const double k = 0.5, sigma = k + 1.0;
    const auto s = dyadic_blocks(make_power_law(2, k, 1.0), -25, -2);
    // 2^{-sigma j} ||Delta_j u|| = sqrt(2 pi (2^{2 sigma} - 1) / (2 sigma))
    const double flat = std::sqrt(2 * pi * (std::pow(2.0, 2 * sigma) - 1) / (2 * sigma));
    const auto b = besov_seminorm(s, sigma);
    CHECK(rel(b.seminorm, flat) < 1e-10);
    CHECK_FALSE(b.diverges);
    const auto above = besov_seminorm(s, sigma + 0.25);
    CHECK(above.diverges);
    CHECK(above.arg_sup == -25);
  }

  TEST_CASE("script A membership") {
    const auto s = dyadic_blocks(make_power_law(2, 0.5, 1.0), -25, -2);
    const auto in = script_A_membership(s, 1.5, 2);
    CHECK(in.in_besov);
    CHECK(in.in_script_A);
    CHECK(in.strides.size() >= 5);
    const auto below = script_A_membership(s, 1.25, 1);
    CHECK(below.vanishing);
    CHECK_FALSE(below.in_script_A);
    CHECK_THROWS_AS(script_A_membership(s, 1.5, 6), std::invalid_argument);

    const auto z = dyadic_blocks(make_zero_profile(2), -25, -2);
    CHECK_FALSE(script_A_membership(z, 1.5, 1).in_script_A);
  }

  TEST_CASE("V_alpha membership") {
    const auto s = dyadic_blocks(make_power_law(2, 0.0, 1.0), -20, -1);
    const auto v = V_alpha_membership(s, 0.5);  // 2 alpha = sigma = 1
    CHECK(v.in_V_alpha);
    CHECK(v.delta > 0.0);
    CHECK(v.j0 >= -16);
    // Gaussian swirl blocks shrink like 2^{2j}, faster than 2^{j/2}.
    const auto sw = dyadic_blocks(make_gaussian_swirl(2), -30, -2);
    const auto m = V_alpha_membership(sw, 0.25);
    CHECK(m.vanishing);
    CHECK_FALSE(m.in_V_alpha);
  }

  TEST_CASE("equivalent norm adds the tail above j0") {
    const auto s = DyadicSpectrum::from_energies(-3, {4.0, 4.0, 4.0, 9.0}, 0.0, 16.0);
    // sup_{j <= -1} 2^{-2 a j} ||Delta_j|| with a = 0 is 2; tail sqrt(9 + 16) = 5
    CHECK(equivalent_norm(s, 1e-300, -1) == doctest::Approx(7.0));
  }

  TEST_CASE("csv layout") {
    const auto s = DyadicSpectrum::from_energies(-2, {1.0, 4.0});
    std::ostringstream a, b;
    write_csv(a, s);
    write_csv(b, s, 1.0);
    CHECK(a.str().rfind("j,block_energy\n", 0) == 0);
    CHECK(b.str().rfind("j,block_energy,ratio_for_alpha\n", 0) == 0);
  }
}
