#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "specdecay/decay_fit.hpp"
#include "specdecay/errors.hpp"
#include "specdecay/synthesis.hpp"
#include "support.hpp"

using namespace specdecay;
using testing::rel;
constexpr double pi = std::numbers::pi;

namespace {

std::pair<std::vector<double>, std::vector<double>> power_series(double sigma, double C, double shift = 0.0) {
  std::vector<double> t = log_time_grid(1.0, 1e6, 20), e;
  for (double x : t) e.push_back(C * std::pow(1 + x + shift, -sigma));
  return {t, e};
}

}  // namespace

TEST_SUITE("decay_fit") {
  TEST_CASE("exact power law is two-sided with unit ratio") {
    const auto [t, e] = power_series(1.5, 2.0);
    const auto c = fit_rate(t, e, {10.0, 1e6});
    CHECK(c.verdict == RateVerdict::two_sided);
    CHECK(c.sigma_hat == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rel(c.c_lower, 2.0) < 1e-10);
    CHECK(rel(c.C_upper, 2.0) < 1e-10);
    CHECK(c.residual < 1e-10);
    CHECK(c.convention.alpha_amplitude == doctest::Approx(0.75));
  }

  TEST_CASE("fit is equivariant under scaling") {
    const auto [t, e] = power_series(0.8, 1.0);
    std::vector<double> e5 = e;
    for (double& x : e5) x *= 5.0;
    const auto a = fit_rate(t, e, {10.0, 1e5});
    const auto b = fit_rate(t, e5, {10.0, 1e5});
    CHECK(b.sigma_hat == doctest::Approx(a.sigma_hat).epsilon(1e-12));
    CHECK(rel(b.C_upper, 5 * a.C_upper) < 1e-12);
    CHECK(b.verdict == a.verdict);
  }

  TEST_CASE("a time shift does not move the exponent") {
    const auto [t, e] = power_series(1.0, 1.0, 3.0);
    const auto c = fit_rate(t, e, {100.0, 1e6});
    CHECK(c.sigma_hat == doctest::Approx(1.0).epsilon(0.01));
    CHECK(c.verdict == RateVerdict::two_sided);
  }

  TEST_CASE("windows shorter than a decade") {
    const auto [t, e] = power_series(1.0, 1.0);
    CHECK_THROWS_AS(fit_rate(t, e, {10.0, 50.0}), WindowTooShort);
    CHECK_THROWS_AS(fit_rate({10.0, 1e3}, {1.0, 1e-2}, {10.0, 1e3}), WindowTooShort);
  }

  TEST_CASE("logarithmic decay has no algebraic rate") {
    const auto p = decay_profile(Field(make_log_counterexample(2)), log_time_grid(1e2, 1e8, 20));
    const auto c = fit_rate(p, {1e2, 1e8});
    CHECK(c.verdict == RateVerdict::no_algebraic_rate);
    CHECK(c.sigma_hat < 0.2);
  }

  TEST_CASE("swirl profile certifies sigma = 2") {
    const auto p = decay_profile(Field(make_gaussian_swirl(2)), log_time_grid(10.0, 1e4, 20));
    const auto c = fit_rate(p, {10.0, 1e4});
    CHECK(c.sigma_hat == doctest::Approx(2.0).epsilon(0.01));
    CHECK(c.verdict == RateVerdict::two_sided);
  }

  TEST_CASE("one-sided verdicts") {
    // Compensated at the claimed exponent, t^{-1} log t keeps rising and t^{-1} / log t keeps falling.
    std::vector<double> t = log_time_grid(10.0, 1e8, 10), e;
    for (double x : t) e.push_back(std::log(1 + x) / (1 + x));
    FitOptions o;
    o.claimed_sigma = 1.0;
    const auto c = fit_rate(t, e, {10.0, 1e8}, o);
    CHECK(c.verdict == RateVerdict::lower_only);
    for (std::size_t i = 0; i < t.size(); ++i) e[i] = 1.0 / ((1 + t[i]) * std::log(1 + t[i]));
    CHECK(fit_rate(t, e, {10.0, 1e8}, o).verdict == RateVerdict::upper_only);
  }

  TEST_CASE("convention record round trip") {
    const auto e = DecayExponent::from_amplitude_alpha(0.75);
    const auto r = ConventionRecord::of(e);
    CHECK(r.sigma == 1.5);
    CHECK(r.alpha_energy == 1.5);
    CHECK(DecayExponent::squared(r.sigma).amplitude_alpha() == 0.75);
    CHECK(std::string(to_string(RateVerdict::upper_only)) == "upper_only");
  }

  TEST_CASE("equivalence on a power law, sharp and smooth") {
    for (auto mode : {BlockMode::sharp, BlockMode::smooth}) {
      EquivalenceOptions o;
      o.mode = mode;
      const auto r = equivalence_report(make_power_law(2, 0.5, 1.0), {1.0, 1.5, 2.0}, rho_ladder(), o);
      REQUIRE(r.rows.size() == 4);
      CHECK(r.agree);
      CHECK(r.rows[0].heat.holds);
      CHECK(r.rows[0].mass.holds);
      CHECK(r.rows[0].membership.holds);
      CHECK(r.rows[2].heat.holds);
      CHECK_FALSE(r.rows[1].heat.holds);
      CHECK_FALSE(r.rows[3].mass.holds);
    }
  }

  TEST_CASE("equivalence is negative on the log counterexample") {
    const auto r = equivalence_report(make_log_counterexample(2), {0.1, 0.5}, rho_ladder());
    CHECK(r.agree);
    for (const auto& row : r.rows) {
      CHECK_FALSE(row.heat.holds);
      CHECK_FALSE(row.mass.holds);
      CHECK_FALSE(row.membership.holds);
    }
  }

  TEST_CASE("rho ladder spans five decades") {
    CHECK(rho_ladder().size() == 29);
    CHECK_THROWS_AS(equivalence_report(make_power_law(2, 0.5, 1.0), {1.5}, rho_ladder(1e-4, 1e-1, 4)), WindowTooShort);
  }

  TEST_CASE("inverse wiegner on an exact heat solution") {
    SimConfig cfg;
    cfg.grid = Grid(2, 2 * pi / 0.02, 64);
    cfg.t_end = 200.0;
    const auto tr = evolve_nse(make_taylor_green(cfg.grid, 1, 1.0), cfg);
    const auto r = inverse_wiegner_check(tr);
    CHECK(r.exact);
    CHECK(r.passes);
  }

  TEST_CASE("json and text exports") {
    const auto [t, e] = power_series(1.0, 1.0);
    const auto c = fit_rate(t, e, {10.0, 1e6});
    const auto j = to_json(c);
    CHECK(j.at("verdict") == "two_sided");
    CHECK(j.at("convention").at("alpha_amplitude") == doctest::Approx(0.5));
    std::ostringstream out;
    write_text(out, c);
    CHECK(out.str().find("two_sided") != std::string::npos);
  }
}
