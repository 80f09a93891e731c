#include "edlab/statelib.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "edlab/error.hpp"

namespace edlab {
namespace {

constexpr double kRandomEnvelope = 1.0;
constexpr double kRandomShift = 0.5;
constexpr double kRandomBoost = 1.0;

void require_inside(const GridSpec& grid, double lo, double hi, const char* what) {
  if (lo < grid.x_min() || hi > grid.x_max()) {
    std::ostringstream msg;
    msg << what << ": feature [" << lo << ", " << hi << "] does not fit in the domain ["
        << grid.x_min() << ", " << grid.x_max() << "] with the required margin";
    throw PreconditionError(msg.str());
  }
}

void require_resolved(const GridSpec& grid, double sigma, const char* what) {
  if (!(sigma > 0.0)) throw PreconditionError(std::string(what) + ": sigma must be positive");
  if (sigma / grid.dx() < kMinCellsPerSigma) {
    std::ostringstream msg;
    msg << what << ": sigma = " << sigma << " spans fewer than " << kMinCellsPerSigma
        << " grid cells (dx = " << grid.dx() << ")";
    throw PreconditionError(msg.str());
  }
}

double gaussian_envelope(double u, double sigma) { return std::exp(-u * u / (4.0 * sigma * sigma)); }

ComplexVector gaussian(const GridSpec& grid, const GaussianSpec& s) {
  require_resolved(grid, s.sigma, "gaussian");
  require_inside(grid, s.x0 - kGaussianMarginSigmas * s.sigma, s.x0 + kGaussianMarginSigmas * s.sigma,
                 "gaussian");
  ComplexVector amps(grid.n_points());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double x = grid.x(i);
    amps[i] = gaussian_envelope(x - s.x0, s.sigma) * std::polar(1.0, s.p0 * x / grid.hbar());
  }
  return amps;
}

ComplexVector bump(const GridSpec& grid, const BumpSpec& s) {
  if (!(s.halfwidth > 0.0)) throw PreconditionError("bump: halfwidth must be positive");
  require_inside(grid, s.center - s.halfwidth - grid.dx(), s.center + s.halfwidth + grid.dx(), "bump");
  ComplexVector amps(grid.n_points());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double u = grid.x(i) - s.center;
    if (std::abs(u) < s.halfwidth) {
      const double c = std::cos(std::numbers::pi * u / (2.0 * s.halfwidth));
      amps[i] = c * c;
    }
  }
  return amps;
}

ComplexVector symmetric_pair(const GridSpec& grid, const SymmetricPairSpec& s) {
  require_resolved(grid, s.sigma, "symmetric_pair");
  if (!(s.separation >= 0.0)) throw PreconditionError("symmetric_pair: separation must be >= 0");
  const double reach = 0.5 * s.separation + kGaussianMarginSigmas * s.sigma;
  require_inside(grid, grid.center() - reach, grid.center() + reach, "symmetric_pair");
  const double half = 0.5 * s.separation;
  ComplexVector amps(grid.n_points());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double u = grid.offset(i);
    amps[i] = gaussian_envelope(u - half, s.sigma) + gaussian_envelope(u + half, s.sigma);
  }
  return amps;
}

ComplexVector random_state(const GridSpec& grid, const RandomSpec& s) {
  if (s.smoothness < 0 || s.smoothness > kMaxRandomOrder) {
    throw PreconditionError("random: smoothness must lie in [0, " + std::to_string(kMaxRandomOrder) + "]");
  }
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shift = kRandomShift * kRandomEnvelope * uniform(rng);
  const double boost = kRandomBoost * uniform(rng);
  const int order = s.smoothness;
  std::vector<Complex> coefficients(static_cast<std::size_t>(order) + 1);
  for (auto& c : coefficients) {
    const double re = normal(rng);
    const double im = normal(rng);
    c = {re, im};
  }

  // Oscillator turning point of the highest order plus four envelope lengths.
  const double reach = std::abs(shift) + (std::sqrt(2.0 * order + 1.0) + 4.0) * kRandomEnvelope;
  require_inside(grid, grid.center() - reach, grid.center() + reach, "random");

  ComplexVector amps(grid.n_points());
  const double norm0 = std::pow(std::numbers::pi, -0.25);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double u = grid.offset(i) - shift;
    const double xi = u / kRandomEnvelope;
    // Normalized Hermite functions by the stable three-term recurrence.
    double h_prev = 0.0;
    double h = norm0 * std::exp(-0.5 * xi * xi);
    Complex acc = coefficients[0] * h;
    for (int n = 0; n < order; ++n) {
      const double next = std::sqrt(2.0 / (n + 1.0)) * xi * h - std::sqrt(n / (n + 1.0)) * h_prev;
      h_prev = h;
      h = next;
      acc += coefficients[static_cast<std::size_t>(n) + 1] * h;
    }
    amps[i] = acc * std::polar(1.0, boost * u / grid.hbar());
  }
  return amps;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

WaveFunction make_state(const GridSpec& grid, const StateSpec& spec) {
  ComplexVector amps = std::visit(
      Overloaded{[&](const GaussianSpec& s) { return gaussian(grid, s); },
                 [&](const BumpSpec& s) { return bump(grid, s); },
                 [&](const SymmetricPairSpec& s) { return symmetric_pair(grid, s); },
                 [&](const RandomSpec& s) { return random_state(grid, s); }},
      spec);
  auto psi = WaveFunction::normalized(grid, std::move(amps));
  require_confined(psi, describe(spec));
  return psi;
}

SymmetryReport is_symmetric(const WaveFunction& psi, double about) {
  const GridSpec& g = psi.grid();
  if (std::abs(about - g.center()) > 1e-12 * g.length()) {
    throw PreconditionError("is_symmetric: reflection axis must be the domain centre");
  }
  const std::size_t n = g.n_points();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::norm(psi[i] - psi[n - 1 - i]);
  const double asymmetry = std::sqrt(acc * g.dx());
  return {asymmetry < kSymmetryTolerance, asymmetry};
}

std::string describe(const StateSpec& spec) {
  std::ostringstream out;
  std::visit(Overloaded{[&](const GaussianSpec& s) {
                          out << "gaussian(x0=" << s.x0 << ", p0=" << s.p0 << ", sigma=" << s.sigma << ")";
                        },
                        [&](const BumpSpec& s) {
                          out << "bump(center=" << s.center << ", halfwidth=" << s.halfwidth << ")";
                        },
                        [&](const SymmetricPairSpec& s) {
                          out << "symmetric_pair(separation=" << s.separation << ", sigma=" << s.sigma << ")";
                        },
                        [&](const RandomSpec& s) {
                          out << "random(seed=" << s.seed << ", smoothness=" << s.smoothness << ")";
                        }},
             spec);
  return out.str();
}

std::vector<WaveFunction> random_corpus(const GridSpec& grid, std::size_t count,
                                        std::uint64_t base_seed, int smoothness) {
  std::vector<WaveFunction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(make_state(grid, RandomSpec{base_seed + i, smoothness}));
  }
  return out;
}

}  // namespace edlab
