#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specdecay/errors.hpp"
#include "specdecay/synthesis.hpp"
#include "support.hpp"

using namespace specdecay;
using testing::rel;
constexpr double pi = std::numbers::pi;

TEST_SUITE("synthesis") {
  TEST_CASE("power law energy must be finite") {
    CHECK_THROWS_AS(make_power_law(2, -1.0, 1.0), InfiniteEnergy);
    CHECK_THROWS_AS(make_power_law(3, -1.6, 1.0), InfiniteEnergy);
    CHECK_NOTHROW(make_power_law(3, -1.4, 1.0));
  }

  TEST_CASE("shell constants") {
    CHECK(shell_constant(2, ShellNormalization::unit) == 1.0);
    // c_2^2 = 2 * 2 pi * 3 / 4 = 3 pi
    CHECK(rel(shell_constant(2, ShellNormalization::literal), std::sqrt(3 * pi)) < 1e-14);
    CHECK(rel(shell_constant(3, ShellNormalization::literal), std::sqrt(2 * 4 * pi * 7 / 9.0)) < 1e-14);
  }

  TEST_CASE("perturbation of the zero datum replaces every shell") {
    const double alpha = 0.25, eps = 0.1;
    const auto p = make_v_alpha_perturbation(make_zero_profile(2), alpha, eps, -3);
    const auto& r = p.report;
    CHECK(r.lower_bound_holds);
    CHECK(r.distance_holds);
    for (const auto& row : r.rows) {
      CHECK_FALSE(row.kept);
      CHECK(rel(row.w_ratio, eps) < 1e-9);
      CHECK(rel(row.distance_ratio, eps) < 1e-9);
    }
    CHECK(r.rows.front().j == -40);
    CHECK(r.rows.back().j == -3);
    // Shells of the unit normalization carry energy eps^2 2^{4 alpha j}.
    const auto s = dyadic_blocks(p.w, -20, -3);
    CHECK(rel(s.energy(-10), eps * eps * std::pow(2.0, 4 * alpha * -10)) < 1e-9);
  }

  TEST_CASE("perturbation keeps blocks that are already large") {
    const auto u0 = make_power_law(2, -0.5, 1.0);  // 2^{-2 alpha j}||Delta_j|| constant at 2 alpha = 0.5
    const auto p = make_v_alpha_perturbation(u0, 0.25, 1e-3, -3);
    for (const auto& row : p.report.rows) {
      CHECK(row.kept);
      CHECK(row.distance_ratio == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  TEST_CASE("literal normalization is reported with its constant") {
    const auto p = make_v_alpha_perturbation(make_zero_profile(2), 0.25, 0.01, -8, -30, ShellNormalization::literal);
    CHECK(rel(p.report.c_n, std::sqrt(3 * pi)) < 1e-14);
    CHECK(p.report.c_lower == 1.0);
    CHECK(p.report.lower_bound_holds);
    CHECK_FALSE(p.report.distance_holds);
  }

  TEST_CASE("grid perturbation") {
    const Grid g(2, 2 * pi / std::ldexp(1.0, -9), 256);
    const auto p = make_v_alpha_perturbation(GridField(g), 0.25, 0.1, -3);
    CHECK(p.report.rows.size() >= 4);
    CHECK(p.report.lower_bound_holds);
    CHECK(p.report.distance_holds);
    CHECK(hermitian_defect(p.w) < 1e-14);
    CHECK(divergence_defect(p.w) < 1e-13);
  }

  TEST_CASE("random fields are seeded, Hermitian and divergence-free") {
    const Grid g(3, 2 * pi, 16);
    auto env = [](double k) { return std::exp(-k * k / 8); };
    const auto a = make_random_div_free(g, 42, env);
    const auto b = make_random_div_free(g, 42, env);
    const auto c = make_random_div_free(g, 43, env);
    CHECK(norms(difference(a, b)).l2 == 0.0);
    CHECK(norms(difference(a, c)).l2 > 0.0);
    CHECK(hermitian_defect(a) < 1e-15);
    CHECK(divergence_defect(a) < 1e-14);
    for (std::size_t p = 0; p < g.points(); ++p)
      if (g.is_nyquist(p)) CHECK(std::abs(a.at(p)[0]) == 0.0);
  }

  TEST_CASE("random phase mode reproduces the envelope exactly") {
    const Grid g(2, 2 * pi, 32);
    auto env = [](double k) { return 1.0 / (1.0 + k * k); };
    const auto f = make_random_div_free(g, 7, env);
    for (std::size_t p = 1; p < g.points(); p += 37) {
      if (g.is_nyquist(p)) continue;
      const auto c = f.at(p);
      CHECK(rel(std::norm(c[0]) + std::norm(c[1]), env(std::sqrt(g.wavenumber_sq(p)))) < 1e-12);
    }
  }

  TEST_CASE("descriptor errors") {
    CHECK_THROWS_AS(profile_from_json({{"kind", "nope"}}), ConfigInvalid);
    CHECK_THROWS_AS(profile_from_json({{"kind", "power_law"}, {"dim", 1}, {"kappa", 0.0}}), ConfigInvalid);
    CHECK_THROWS_AS(profile_from_json({{"kind", "tabulated"}, {"r", {1.0, 2.0}}, {"A", {1.0}}}), ConfigInvalid);
  }

  TEST_CASE("tabulated profile interpolates a power law exactly") {
    std::vector<double> r, a;
    for (int i = 0; i <= 20; ++i) {
      r.push_back(std::pow(10.0, -4 + 0.2 * i));
      a.push_back(r.back() * r.back());
    }
    const auto t = make_tabulated(2, r, a);
    const auto p = make_power_law(2, 1.0, 1.0);
    CHECK(rel(t.amplitude(0.0371), 0.0371 * 0.0371) < 1e-12);
    CHECK(rel(sobolev_energy(t, 0), sobolev_energy(p, 0)) < 1e-9);
    CHECK(t.amplitude(1.5) == 0.0);
  }
}
