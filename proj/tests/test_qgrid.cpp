#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "edlab/error.hpp"
#include "edlab/qgrid.hpp"
#include "oracles.hpp"

using namespace edlab;

namespace {

ComplexVector gaussian_samples(const GridSpec& g, double x0, double p0, double sigma) {
  ComplexVector v(g.n_points());
  const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = g.x(i) - x0;
    v[i] = norm * std::exp(-u * u / (4.0 * sigma * sigma)) * std::polar(1.0, p0 * g.x(i) / g.hbar());
  }
  return v;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

TEST_CASE("grid construction rejects invalid parameters") {
  CHECK_THROWS_AS(make_grid(100, -1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(8, -1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(64, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(64, 2.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(64, -1.0, 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(make_grid(64, -1.0, std::nan(""), 1.0), PreconditionError);
  CHECK_NOTHROW(make_grid(16, -1.0, 1.0));
}

TEST_CASE("grid geometry") {
  const auto g = make_grid(256, -16.0, 16.0);
  CHECK(g.dx() == doctest::Approx(0.125));
  CHECK(g.dp() == doctest::Approx(2.0 * std::numbers::pi / 32.0));
  CHECK(g.nyquist() == doctest::Approx(std::numbers::pi / 0.125));
  CHECK(g.x(0) == doctest::Approx(-16.0 + 0.0625));
  CHECK(g.x(255) == doctest::Approx(16.0 - 0.0625));
  CHECK(g.symmetric_about_origin());
  for (std::size_t i = 0; i < 256; ++i) CHECK(g.x(i) == -g.x(255 - i));
  CHECK(g.p(128) == 0.0);
  CHECK(g.p(0) == doctest::Approx(-g.nyquist()));
  // Natural-order bins cover the same momenta as the ascending grid.
  for (std::size_t m = 0; m < 256; ++m) CHECK(g.p_fft(m) == doctest::Approx(g.p((m + 128) % 256)));
  CHECK_FALSE(make_grid(64, -1.0, 3.0).symmetric_about_origin());
}

TEST_CASE("momentum transform matches the direct sum") {
  const auto g = make_grid(64, -5.0, 7.0, 0.7);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexVector v(64);
  for (auto& c : v) c = {n(rng), n(rng)};
  const auto fast = fourier_transform(v, g.position_axis(), g.momentum_axis(), g.hbar(), -1);
  const auto slow = oracle::direct_dft(v, g.positions(), g.momenta(), g.hbar());
  double scale = 0.0;
  for (const auto& c : slow) scale = std::max(scale, std::abs(c));
  CHECK(max_abs_diff(fast, slow) < 1e-12 * scale);
}

TEST_CASE("momentum round trip and Parseval") {
  const auto g = make_grid(128, -10.0, 10.0);
  const auto psi = WaveFunction::normalized(g, gaussian_samples(g, 1.0, 0.7, 1.0));
  const auto phi = to_momentum(psi);
  double mass = 0.0;
  for (const auto& c : phi.amplitudes) mass += std::norm(c);
  CHECK(mass * g.dp() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(max_abs_diff(from_momentum(phi), psi.amplitudes()) < 1e-12);
}

TEST_CASE("gaussian momentum amplitude matches the analytic transform") {
  const auto g = make_grid(256, -16.0, 16.0);
  const double x0 = 0.5;
  const double p0 = -1.0;
  const double s = 1.2;
  const WaveFunction psi(g, gaussian_samples(g, x0, p0, s));
  const auto phi = to_momentum(psi);
  const double norm = std::pow(2.0 * s * s / std::numbers::pi, 0.25);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.n_points(); ++k) {
    const double q = g.p(k) - p0;
    const Complex expected = norm * std::exp(-s * s * q * q) * std::polar(1.0, -q * x0);
    worst = std::max(worst, std::abs(phi.amplitudes[k] - expected));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("spectral momentum operator differentiates a gaussian") {
  const auto g = make_grid(256, -16.0, 16.0);
  const double s = 1.0;
  const auto v = gaussian_samples(g, 0.3, 0.0, s);
  const auto pv = apply_momentum(g, v);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = g.x(i) - 0.3;
    const Complex expected = Complex(0.0, -1.0) * (-u / (2.0 * s * s)) * v[i];
    worst = std::max(worst, std::abs(pv[i] - expected));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("moments of a gaussian") {
  for (double hbar : {1.0, 0.25}) {
    const auto g = make_grid(512, -20.0, 20.0, hbar);
    const auto psi = WaveFunction::normalized(g, gaussian_samples(g, -1.5, 0.8, 1.3));
    const auto m = moments(psi);
    CHECK(m.mean_x == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(m.delta_x == doctest::Approx(1.3).epsilon(1e-12));
    CHECK(m.mean_p == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(m.delta_p == doctest::Approx(hbar / 2.6).epsilon(1e-10));
  }
}

TEST_CASE("cos^2 bump spreads converge to the quadrature values") {
  const auto exact = oracle::bump_moments(1.0);
  CHECK(exact.delta_x == doctest::Approx(0.282896401934505).epsilon(1e-12));
  CHECK(exact.delta_p == doctest::Approx(std::numbers::pi / std::sqrt(3.0)).epsilon(1e-12));
  const auto g = make_grid(1024, -16.0, 16.0);
  ComplexVector v(g.n_points());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = g.x(i);
    if (std::abs(u) < 1.0) v[i] = std::pow(std::cos(std::numbers::pi * u / 2.0), 2);
  }
  const auto m = moments(WaveFunction::normalized(g, v));
  CHECK(m.delta_x == doctest::Approx(exact.delta_x).epsilon(1e-5));
  CHECK(m.delta_p == doctest::Approx(exact.delta_p).epsilon(1e-5));
}

TEST_CASE("wavefunction invariants") {
  const auto g = make_grid(64, -8.0, 8.0);
  ComplexVector v(64, Complex{1.0, 0.0});
  CHECK_THROWS_AS(WaveFunction(g, v), InvariantError);
  CHECK_THROWS_AS(WaveFunction(g, ComplexVector(10)), PreconditionError);
  CHECK_THROWS_AS(WaveFunction::normalized(g, ComplexVector(64)), InvariantError);
  const auto flat = WaveFunction::normalized(g, v);
  CHECK(squared_norm(g, flat.amplitudes()) == doctest::Approx(1.0));
}

TEST_CASE("confinement flags boundary and aliasing mass") {
  const auto g = make_grid(256, -16.0, 16.0);
  const auto centred = WaveFunction::normalized(g, gaussian_samples(g, 0.0, 0.0, 1.0));
  CHECK(confinement(centred).ok());
  CHECK_NOTHROW(require_confined(centred, "centred"));

  const auto edge = WaveFunction::normalized(g, gaussian_samples(g, 14.0, 0.0, 1.0));
  CHECK(confinement(edge).boundary_mass > kBoundaryTolerance);
  CHECK_THROWS_AS(require_confined(edge, "edge"), ConfinementError);

  const auto fast = WaveFunction::normalized(g, gaussian_samples(g, 0.0, 0.95 * g.nyquist(), 1.0));
  CHECK(confinement(fast).aliasing_mass > kAliasingTolerance);
  CHECK_THROWS_AS(require_confined(fast, "fast"), ConfinementError);
}

TEST_CASE("distributions carry unit mass and ascending support") {
  const auto g = make_grid(128, -8.0, 8.0);
  const auto psi = WaveFunction::normalized(g, gaussian_samples(g, 0.0, 1.0, 0.8));
  for (auto b : {Basis::position, Basis::momentum}) {
    const auto d = distribution(psi, b);
    double mass = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) mass += d.mass(i);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < d.size(); ++i) CHECK(d.support()[i] > d.support()[i - 1]);
  }
  CHECK_THROWS_AS(ProbabilityDistribution({0.0, 1.0}, {0.5, 0.6}, 1.0), InvariantError);
  CHECK_THROWS_AS(ProbabilityDistribution({1.0, 0.0}, {0.5, 0.5}, 1.0), PreconditionError);
}

TEST_CASE("csv serialization") {
  const auto g = make_grid(16, -1.0, 1.0);
  const auto psi = WaveFunction::normalized(g, ComplexVector(16, Complex{1.0, 0.0}));
  std::ostringstream a;
  write_csv(a, psi);
  CHECK(a.str().rfind("coordinate,re,im\n-0.9375,0.707106781187,0\n", 0) == 0);
  std::ostringstream b;
  write_csv(b, distribution(psi, Basis::position));
  CHECK(b.str().rfind("coordinate,weight\n", 0) == 0);
  std::ostringstream c;
  write_csv(c, to_momentum(psi));
  CHECK(c.str().rfind("coordinate,re,im\n", 0) == 0);
}
