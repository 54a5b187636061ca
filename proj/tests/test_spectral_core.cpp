#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstring>
#include <numbers>
#include <sstream>

#include "specdecay/errors.hpp"
#include "specdecay/spectral_core.hpp"
#include "specdecay/synthesis.hpp"
#include "support.hpp"

using namespace specdecay;
using testing::rel;
constexpr double pi = std::numbers::pi;

TEST_SUITE("spectral_core") {
  TEST_CASE("power law norms match the shell integral") {
    // ||u||^2 = |S^{n-1}| int_0^c r^{2k} r^{n-1} dr = |S^{n-1}| c^{2k+n} / (2k+n)
    for (int n : {2, 3}) {
      const double area = n == 2 ? 2.0 * pi : 4.0 * pi;
      for (double k : {-0.5, 0.0, 0.5, 1.5}) {
        const double c = 0.7;
        const auto p = make_power_law(n, k, c);
        CHECK(rel(norms(p).l2 * norms(p).l2, area * std::pow(c, 2 * k + n) / (2 * k + n)) < 1e-10);
        const double rho = 1e-3;
        CHECK(rel(low_freq_mass(p, rho), area * std::pow(rho, 2 * k + n) / (2 * k + n)) < 1e-10);
      }
    }
  }

  TEST_CASE("gaussian swirl Sobolev energies") {
    // 2 pi int r^{2l+3} e^{-r^2} dr = pi Gamma(l+2): pi, 2 pi, 6 pi
    const auto g = make_gaussian_swirl(2);
    CHECK(rel(sobolev_energy(g, 0), pi) < 1e-10);
    CHECK(rel(sobolev_energy(g, 1), 2 * pi) < 1e-10);
    CHECK(rel(sobolev_energy(g, 2), 6 * pi) < 1e-10);
  }

  TEST_CASE("log counterexample has finite energy 2 pi / ln 2") {
    // 2 pi int_0^{1/2} dr / (r ln^2 r) = 2 pi / ln 2
    const auto v0 = make_log_counterexample(2);
    CHECK(rel(sobolev_energy(v0, 0), 2 * pi / std::log(2.0)) < 1e-9);
    CHECK(rel(low_freq_mass(v0, 1e-6), 2 * pi / std::log(1e6)) < 1e-9);
  }

  TEST_CASE("combine and scaled act on the signed root") {
    const auto p = make_power_law(2, 0.5, 1.0);
    CHECK(rel(sobolev_energy(scaled(p, 3.0), 0), 9.0 * sobolev_energy(p, 0)) < 1e-12);
    CHECK(rel(sobolev_energy(combine(p, 1.0, p, -0.5), 0), 0.25 * sobolev_energy(p, 0)) < 1e-12);
    const auto zero = combine(p, 1.0, p, -1.0);
    for (double r : {1e-6, 0.01, 0.5, 0.99}) CHECK(zero.amplitude(r) == 0.0);
    CHECK_THROWS_AS(combine(p, 1.0, make_power_law(3, 0.5, 1.0), 1.0), std::invalid_argument);
  }

  TEST_CASE("radial integral reports tail divergence") {
    RadialProfile bad(
        2, [](double) { return 1.0; }, [](double) { return TailEstimate{1.0, 1.0}; }, 0.0, 1.0, {}, {{"kind", "bad"}});
    CHECK_THROWS_AS(radial_integral(bad, 0.0, 1.0), QuadratureDivergence);
  }

  TEST_CASE("sampled field obeys discrete Plancherel") {
    // Riemann sum of a Gaussian converges faster than any power of k0.
    const Grid g(2, 2 * pi / 0.05, 512);
    const auto f = sample_on_grid(make_gaussian_swirl(2), g);
    CHECK(rel(norms(f).l2 * norms(f).l2, pi) < 1e-10);
    CHECK(hermitian_defect(f) < 1e-14);
    CHECK(divergence_defect(f) < 1e-14);
  }

  TEST_CASE("translated copies keep the Hermitian symmetry") {
    const Grid g(2, 2 * pi / 0.1, 64);
    const auto f = sample_on_grid(make_gaussian_swirl(2), g, {{-2.0, 0.0, 0.0}, {2.0, 0.0, 0.0}});
    CHECK(hermitian_defect(f) < 1e-14);
  }

  TEST_CASE("leray projection is idempotent and kills gradients") {
    const Grid g(3, 2 * pi, 16);
    const auto f = testing::random_field(g, 11);
    const auto p1 = leray_project(f);
    const auto p2 = leray_project(p1);
    CHECK(norms(difference(p1, p2)).l2 <= 1e-14 * norms(p1).l2);
    CHECK(divergence_defect(p1) < 1e-13);

    std::vector<cplx> grad(g.points() * 3);
    for (std::size_t p = 0; p < g.points(); ++p) {
      const auto k = g.wavevector(p);
      const cplx phi = f.at(p)[0];
      for (int i = 0; i < 3; ++i) grad[p * 3 + i] = cplx(0, 1) * k[i] * phi;
    }
    const GridField gf(g, grad);
    CHECK(norms(leray_project(gf)).l2 <= 1e-14 * norms(gf).l2);
  }

  TEST_CASE("grid low-frequency mass below the lattice") {
    const Grid g(2, 2 * pi, 32);
    const auto f = testing::random_field(g, 3);
    CHECK_THROWS_AS(low_freq_mass(f, 1.5), MassUnresolvable);
    CHECK(low_freq_mass(f, 1e6) == doctest::Approx(norms(f).l2 * norms(f).l2).epsilon(1e-12));
  }

  TEST_CASE("grid field container round trip") {
    const Grid g(2, 3.0, 16);
    const auto f = testing::random_field(g, 5);
    std::stringstream ss;
    write_grid_field(ss, f);
    const auto h = read_grid_field(ss);
    CHECK(h.grid() == g);
    CHECK(std::memcmp(h.coeffs().data(), f.coeffs().data(), f.coeffs().size_bytes()) == 0);
  }

  TEST_CASE("grid field container written on the other endianness") {
    const Grid g(2, 3.0, 16);
    const auto f = testing::random_field(g, 6);
    std::stringstream ss;
    write_grid_field(ss, f);
    std::string bytes = ss.str();
    auto swap = [&](std::size_t off, std::size_t width) {
      std::reverse(bytes.begin() + off, bytes.begin() + off + width);
    };
    for (std::size_t off = 4; off < 24; off += 4) swap(off, 4);
    for (std::size_t off = 24; off < bytes.size(); off += 8) swap(off, 8);
    std::stringstream swapped(bytes);
    const auto h = read_grid_field(swapped);
    CHECK(h.grid() == g);
    CHECK(std::memcmp(h.coeffs().data(), f.coeffs().data(), f.coeffs().size_bytes()) == 0);
  }

  TEST_CASE("grid field container rejects damage") {
    const Grid g(2, 3.0, 16);
    std::stringstream ss;
    write_grid_field(ss, testing::random_field(g, 7));
    std::string bytes = ss.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(read_grid_field(truncated), FormatError);
    bytes[0] = 'X';
    std::stringstream bad_magic(bytes);
    CHECK_THROWS_AS(read_grid_field(bad_magic), FormatError);
    CHECK_THROWS_AS(load_grid_field("/nonexistent/field.sdgf"), FormatError);
  }

  TEST_CASE("descriptor round trip reproduces the profile") {
    for (const auto& p : {make_power_law(3, 0.25, 0.5), make_log_counterexample(2), make_band_limited(2, 0.1, 2.0, 1.0),
                          scaled(make_gaussian_swirl(2), 2.0)}) {
      const auto q = profile_from_json(to_json(p));
      CHECK(rel(sobolev_energy(q, 0), sobolev_energy(p, 0)) < 1e-14);
    }
  }
}
