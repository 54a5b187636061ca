#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>

#include "specdecay/errors.hpp"
#include "specdecay/nse_sim.hpp"
#include "specdecay/synthesis.hpp"
#include "support.hpp"

using namespace specdecay;
using testing::rel;
constexpr double pi = std::numbers::pi;

namespace {

SimConfig small_config(double k0, int n, double t_end) {
  SimConfig c;
  c.grid = Grid(2, 2 * pi / k0, n);
  c.t_end = t_end;
  c.dt = 0.05;
  return c;
}

GridField small_random(const Grid& g, std::uint64_t seed, double amp) {
  auto env = [amp](double k) { return amp * amp * k * k * std::exp(-k * k * 4); };
  return dealias_truncate(make_random_div_free(g, seed, env));
}

}  // namespace

TEST_SUITE("nse_sim") {
  TEST_CASE("taylor-green decays at the heat rate") {
    const auto cfg = small_config(0.1, 64, 10.0);
    const int m = 3;
    const auto u0 = make_taylor_green(cfg.grid, m, 1.0);
    const auto tr = evolve_nse(u0, cfg);
    const double lam = m * m * 0.1 * 0.1 * 2.0;  // |k|^2 of the mode
    const double e0 = tr.u.l2.front();
    for (std::size_t i = 0; i < tr.size(); ++i) {
      CHECK(rel(tr.u.l2[i], e0 * std::exp(-lam * tr.u.times[i])) < 1e-8);
      CHECK(tr.theta_l2[i] <= 1e-10 * e0);
    }
    CHECK(tr.u.times.front() == 0.0);
    CHECK(tr.u.times.back() == doctest::Approx(10.0));
  }

  TEST_CASE("energy audit on small random data") {
    const auto cfg = small_config(0.1, 64, 10.0);
    const auto tr = evolve_nse(small_random(cfg.grid, 5, 0.5), cfg);
    const auto a = energy_audit(tr);
    CHECK(a.inequality_holds);
    CHECK(a.equality_holds);
    CHECK(a.equality_residual < 1e-6);
    CHECK(a.pairs == tr.size() * (tr.size() - 1) / 2);
    for (double s : tr.skew) CHECK(s < 1e-12);
    for (double d : tr.max_div) CHECK(d < 1e-12);
  }

  TEST_CASE("error paths") {
    auto cfg = small_config(0.1, 32, 20.0);
    const auto u0 = make_taylor_green(cfg.grid, 1, 1.0);
    CHECK_THROWS_AS(evolve_nse(u0, cfg), HorizonExceeded);

    cfg.t_end = 5.0;
    cfg.dt_growth = 0.0;
    cfg.dt = 2.0;
    CHECK_THROWS_AS(evolve_nse(make_taylor_green(cfg.grid, 1, 50.0), cfg), CFLViolation);

    cfg = small_config(0.1, 32, 1.0);
    const auto raw = make_random_div_free(cfg.grid, 1, [](double) { return 1.0; });
    CHECK_THROWS_AS(evolve_nse(raw, cfg), std::invalid_argument);
    CHECK_NOTHROW(evolve_nse(dealias_truncate(raw), cfg));

    CHECK_THROWS_AS(evolve_nse(make_taylor_green(Grid(2, 10.0, 32), 1, 1.0), cfg), std::invalid_argument);
    CHECK_THROWS_AS(make_taylor_green(cfg.grid, 0, 1.0), std::invalid_argument);
  }

  TEST_CASE("non-finite states are reported") {
    const auto cfg = small_config(0.1, 32, 5.0);
    auto u0 = make_taylor_green(cfg.grid, 1, 1.0);
    std::vector<cplx> c(u0.coeffs().begin(), u0.coeffs().end());
    c[2 * cfg.grid.flat_index({1, 1, 0})] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(evolve_nse(GridField(cfg.grid, c), cfg), BlowupDetected);
  }

  TEST_CASE("result does not depend on the thread count") {
    const auto cfg = small_config(0.1, 64, 5.0);
    const auto u0 = small_random(cfg.grid, 8, 0.5);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto a = evolve_nse(u0, cfg);
    omp_set_num_threads(2);
    const auto b = evolve_nse(u0, cfg);
    omp_set_num_threads(saved);
    CHECK(a.u.l2 == b.u.l2);
    CHECK(a.energy == b.energy);
    REQUIRE(a.final_state);
    REQUIRE(b.final_state);
    CHECK(std::memcmp(a.final_state->coeffs().data(), b.final_state->coeffs().data(),
                      a.final_state->coeffs().size_bytes()) == 0);
  }

  TEST_CASE("IMEX Euler tracks IF-RK4 at first order") {
    auto cfg = small_config(0.1, 64, 5.0);
    const auto u0 = small_random(cfg.grid, 9, 0.5);
    const auto ref = evolve_nse(u0, cfg);
    cfg.integrator = Integrator::imex_euler;
    cfg.dt_growth = 0.0;
    cfg.dt = 0.01;
    const auto e = evolve_nse(u0, cfg);
    CHECK(e.integrator == Integrator::imex_euler);
    CHECK(rel(e.u.l2.back(), ref.u.l2.back()) < 1e-2);
  }

  TEST_CASE("checkpoint round trip") {
    const Grid g(2, 2 * pi / 0.1, 32);
    const auto f = small_random(g, 4, 1.0);
    const auto path = std::filesystem::temp_directory_path() / "specdecay_test_ckpt.sdgf";
    save_checkpoint(path.string(), f);
    const auto h = load_checkpoint(path.string());
    std::filesystem::remove(path);
    CHECK(std::memcmp(h.coeffs().data(), f.coeffs().data(), f.coeffs().size_bytes()) == 0);
  }

  TEST_CASE("log-log slope of an exact power") {
    std::vector<double> t, y;
    for (int i = 0; i <= 40; ++i) {
      t.push_back(std::pow(10.0, i / 10.0));
      y.push_back(3.0 * std::pow(t.back(), -0.75));
    }
    const auto f = fit_loglog_slope(t, y, 10.0, 1000.0);
    CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(f.samples == 21);
    CHECK_THROWS_AS(fit_loglog_slope(t, y, 10.0, 50.0), WindowTooShort);
  }

  TEST_CASE("liminf of a compensated power law is flat") {
    DecayProfile p;
    p.times = log_time_grid(10.0, 1e5, 10);
    for (double t : p.times) {
      p.l2.push_back(std::pow(t, -0.25));
      p.hdot1.push_back(std::pow(t, -0.75));
      p.hdot2.push_back(std::pow(t, -1.5));  // one quarter too fast
    }
    CHECK(liminf_check(p, 0.25, 0, {10.0, 1e5}).certified);
    CHECK(liminf_check(p, 0.25, 1, {10.0, 1e5}).certified);
    const auto r2 = liminf_check(p, 0.25, 2, {10.0, 1e5});
    CHECK_FALSE(r2.certified);
    CHECK_THROWS_AS(liminf_check(p, 0.25, 3, {10.0, 1e5}), std::invalid_argument);
  }

  TEST_CASE("trace csv header") {
    const auto cfg = small_config(0.1, 32, 2.0);
    const auto tr = evolve_nse(make_taylor_green(cfg.grid, 1, 1.0), cfg);
    std::ostringstream out;
    write_csv(out, tr);
    CHECK(out.str().rfind("t,l2_u,l2_v,theta,hdot1,hdot2,energy_residual\n", 0) == 0);
  }
}
