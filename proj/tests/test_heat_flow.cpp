#include <doctest.h>

#include <cmath>
#include <numbers>

#include "specdecay/errors.hpp"
#include "specdecay/heat_flow.hpp"
#include "specdecay/synthesis.hpp"
#include "support.hpp"

using namespace specdecay;
using testing::rel;
constexpr double pi = std::numbers::pi;

TEST_SUITE("heat_flow") {
  TEST_CASE("gaussian swirl closed form") {
    // 2 pi int r^3 e^{-(1+2t) r^2} dr = pi / (1+2t)^2
    const auto g = make_gaussian_swirl(2);
    for (double t : {0.0, 0.5, 10.0, 1e3, 1e4}) CHECK(rel(sobolev_energy(heat_evolve(g, t), 0), pi / std::pow(1 + 2 * t, 2)) < 1e-10);
  }

  TEST_CASE("power law heat energy is Gamma-function closed form") {
    // 2 pi int_0^inf r^{2k+1} e^{-2 t r^2} dr = pi Gamma(k+1) (2t)^{-(k+1)}, cutoff irrelevant at large t
    const double k = 0.5, t = 1e4;
    const auto p = make_power_law(2, k, 1.0);
    CHECK(rel(sobolev_energy(heat_evolve(p, t), 0), pi * std::tgamma(k + 1) * std::pow(2 * t, -(k + 1))) < 1e-9);
  }

  TEST_CASE("semigroup composition, radial and grid") {
    const auto p = make_power_law(3, 0.25, 1.0);
    const double a = sobolev_energy(heat_evolve(heat_evolve(p, 2.0), 3.0), 1);
    const double b = sobolev_energy(heat_evolve(p, 5.0), 1);
    CHECK(rel(a, b) < 1e-13);

    const Grid g(2, 2 * pi / 0.1, 64);
    const auto f = testing::random_field(g, 9);
    const auto ga = heat_evolve(heat_evolve(f, 0.7), 1.3);
    const auto gb = heat_evolve(f, 2.0);
    CHECK(norms(difference(ga, gb)).l2 <= 1e-14 * norms(gb).l2);
  }

  TEST_CASE("grid profile past the horizon") {
    const Grid g(2, 2 * pi / 0.1, 32);
    const auto f = testing::random_field(g, 2);
    CHECK(validity_horizon(g) == doctest::Approx(10.0));
    CHECK_NOTHROW(decay_profile(Field(f), {1.0, validity_horizon(g)}));
    CHECK_THROWS_AS(decay_profile(Field(f), {1.0, 1.01 * validity_horizon(g)}), HorizonExceeded);
  }

  TEST_CASE("decay profile flags the last decade before the horizon") {
    const Grid g(2, 2 * pi / 0.1, 32);
    const auto p = decay_profile(Field(testing::random_field(g, 4)), {0.5, 2.0});
    CHECK_FALSE(p.horizon_flag[0]);
    CHECK(p.horizon_flag[1]);
    const auto r = decay_profile(Field(make_gaussian_swirl(2)), {1.0, 1e6});
    CHECK(r.backend == "radial");
    CHECK_FALSE(r.horizon_flag[1]);
  }

  TEST_CASE("duhamel factor closed forms") {
    // phi = 1: (1 - e^{-lambda t}) / lambda; phi = e^{-s}: (e^{-t} - e^{-lambda t}) / (lambda - 1)
    const double t = 3.0, lam = 2.5;
    CHECK(rel(duhamel_factor([](double) { return 1.0; }, t, lam), (1 - std::exp(-lam * t)) / lam) < 1e-12);
    CHECK(rel(duhamel_factor([](double s) { return std::exp(-s); }, t, lam),
              (std::exp(-t) - std::exp(-lam * t)) / (lam - 1)) < 1e-12);
    CHECK_THROWS_AS(duhamel_factor([](double s) { return 1.0 / s; }, t, lam), QuadratureDivergence);
  }

  TEST_CASE("stokes duhamel without forcing is the heat flow") {
    const Grid g(2, 2 * pi / 0.1, 32);
    const auto f = testing::random_field(g, 12);
    ForcingSpec none;
    const auto r = stokes_duhamel(f, none, 1.5);
    CHECK(norms(difference(r.field, heat_evolve(f, 1.5))).l2 <= 1e-15 * norms(f).l2);
  }

  TEST_CASE("stokes duhamel with constant-in-time forcing") {
    // u^(t) = e^{-t k^2} u0^ + (1 - e^{-t k^2}) / k^2 g^; check through one lattice mode.
    const Grid g(2, 2 * pi, 16);
    std::vector<cplx> c(g.points() * 2);
    const std::size_t p = g.flat_index({0, 2, 0}), q = g.mirror(p);
    c[2 * p] = 1.0;
    c[2 * q] = 1.0;
    const GridField gf(g, c);
    ForcingSpec f;
    f.phi = [](double) { return 1.0; };
    f.g = Field(gf);
    const auto r = stokes_duhamel(GridField(g), f, 0.5);
    CHECK(rel(r.field.at(p)[0].real(), (1 - std::exp(-0.5 * 4)) / 4) < 1e-12);
  }

  TEST_CASE("forcing bound check") {
    ForcingSpec f;
    f.phi = [](double t) { return std::pow(1 + t, -2.0); };
    f.g = Field(make_gaussian_swirl(2));
    f.alpha = 1.0;
    f.C_f = std::sqrt(pi);  // ||g|| = sqrt(pi)
    auto rep = forcing_bound_check(f, {0.5, 5.0, 50.0});
    CHECK(rep.passes);
    CHECK(rep.worst_margin == doctest::Approx(1.0));
    f.C_f *= 0.5;
    CHECK_FALSE(forcing_bound_check(f, {0.5}).passes);
  }

  TEST_CASE("physical Lp norms of a cosine wave") {
    // Coefficients pi at k = +-e_1 give u = cos(x) e_2 on a box of side 2 pi.
    const Grid g(2, 2 * pi, 32);
    std::vector<cplx> c(g.points() * 2);
    const std::size_t p = g.flat_index({1, 0, 0}), q = g.mirror(p);
    c[2 * p + 1] = pi;
    c[2 * q + 1] = pi;
    const GridField f(g, c);
    CHECK(rel(physical_lp_norm(f, 2.0), std::sqrt(2 * pi * pi)) < 1e-12);
    CHECK(rel(physical_lp_norm(f, 4.0), std::pow(1.5 * pi * pi, 0.25)) < 1e-12);
  }

  TEST_CASE("fourier splitting inequality and its derivative") {
    const auto times = log_time_grid(1.0, 1e6, 5);
    for (const auto& p : {make_power_law(2, 0.5, 1.0), make_gaussian_swirl(2), make_log_counterexample(2)}) {
      const auto r = fourier_splitting_check(p, std::nullopt, times);
      CHECK(r.inequality_holds);
      CHECK(r.worst_margin >= -kSplittingTol);
      CHECK(r.fd_check < 1e-6);
    }
    const auto r = fourier_splitting_check(make_power_law(2, 0.5, 1.0), 1.5, times);
    CHECK(r.rhs_bounded);
    CHECK(r.comp_ratio <= 10.0);
  }

  TEST_CASE("log time grid") {
    const auto t = log_time_grid(1.0, 1e4, 10);
    CHECK(t.size() == 41);
    CHECK(t.front() == 1.0);
    CHECK(t.back() == 1e4);
    CHECK_THROWS_AS(log_time_grid(0.0, 1.0, 10), std::invalid_argument);
  }
}
