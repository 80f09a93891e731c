#include "edlab/qgrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "edlab/error.hpp"
#include "edlab/format.hpp"

namespace edlab {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

GridSpec make_grid(std::size_t n_points, double x_min, double x_max, double hbar) {
  if (!is_power_of_two(n_points) || n_points < kMinGridPoints) {
    throw PreconditionError("grid: n_points must be a power of two >= 16, got " +
                            std::to_string(n_points));
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw PreconditionError("grid: require finite x_max > x_min");
  }
  if (!std::isfinite(hbar) || !(hbar > 0.0)) {
    throw PreconditionError("grid: hbar must be positive");
  }
  return GridSpec(n_points, x_min, x_max, hbar);
}

double GridSpec::dp() const {
  return 2.0 * std::numbers::pi * hbar_ / (static_cast<double>(n_points_) * dx());
}

double GridSpec::offset(std::size_t i) const {
  // (i - (n-1)/2) is a half-integer held exactly in a double.
  return (static_cast<double>(i) - 0.5 * static_cast<double>(n_points_ - 1)) * dx();
}

double GridSpec::p(std::size_t k) const {
  return (static_cast<double>(k) - 0.5 * static_cast<double>(n_points_)) * dp();
}

double GridSpec::p_fft(std::size_t m) const {
  const auto n = static_cast<long long>(n_points_);
  auto signed_index = static_cast<long long>(m);
  if (signed_index >= n / 2) signed_index -= n;
  return static_cast<double>(signed_index) * dp();
}

Axis GridSpec::position_axis() const { return Axis{x(0), dx(), n_points_}; }
Axis GridSpec::momentum_axis() const { return Axis{p(0), dp(), n_points_}; }

std::vector<double> GridSpec::positions() const {
  std::vector<double> out(n_points_);
  for (std::size_t i = 0; i < n_points_; ++i) out[i] = x(i);
  return out;
}

std::vector<double> GridSpec::momenta() const {
  std::vector<double> out(n_points_);
  for (std::size_t k = 0; k < n_points_; ++k) out[k] = p(k);
  return out;
}

bool GridSpec::symmetric_about_origin() const {
  return std::abs(x_min_ + x_max_) <= 1e-12 * length();
}

WaveFunction::WaveFunction(GridSpec grid, ComplexVector amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != grid_.n_points()) {
    throw PreconditionError("wavefunction: amplitude count does not match the grid");
  }
  const double n2 = squared_norm(grid_, amplitudes_);
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "wavefunction: norm^2 = " << n2 << " deviates from 1";
    throw InvariantError(msg.str());
  }
}

WaveFunction WaveFunction::normalized(GridSpec grid, ComplexVector amplitudes) {
  if (amplitudes.size() != grid.n_points()) {
    throw PreconditionError("wavefunction: amplitude count does not match the grid");
  }
  const double n = norm(grid, amplitudes);
  if (!std::isfinite(n) || n == 0.0) {
    throw InvariantError("wavefunction: cannot normalize a zero or non-finite vector");
  }
  for (auto& a : amplitudes) a /= n;
  return WaveFunction(grid, std::move(amplitudes));
}

ProbabilityDistribution::ProbabilityDistribution(std::vector<double> support,
                                                 std::vector<double> weights, double spacing)
    : support_(std::move(support)), weights_(std::move(weights)), spacing_(spacing) {
  if (support_.size() != weights_.size() || support_.empty()) {
    throw PreconditionError("distribution: support and weights must be non-empty and equal length");
  }
  if (!(spacing_ > 0.0)) throw PreconditionError("distribution: spacing must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw InvariantError("distribution: negative or non-finite weight");
    }
    if (i > 0 && !(support_[i] > support_[i - 1])) {
      throw PreconditionError("distribution: support must be strictly ascending");
    }
    total += weights_[i];
  }
  total *= spacing_;
  if (std::abs(total - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "distribution: total mass " << total << " deviates from 1";
    throw InvariantError(msg.str());
  }
}

double ProbabilityDistribution::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += support_[i] * weights_[i];
  return acc * spacing_;
}

double ProbabilityDistribution::variance() const {
  const double mu = mean();
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = support_[i] - mu;
    acc += d * d * weights_[i];
  }
  return acc * spacing_;
}

ComplexVector fourier_transform(std::span<const Complex> samples, const Axis& from,
                                const Axis& to, double hbar, int sign) {
  const std::size_t n = samples.size();
  if (from.size != n || to.size != n) {
    throw PreconditionError("fourier_transform: axis sizes must match the sample count");
  }
  if (sign != 1 && sign != -1) throw PreconditionError("fourier_transform: sign must be +1 or -1");
  const double expected = 2.0 * std::numbers::pi * hbar / static_cast<double>(n);
  if (std::abs(from.spacing * to.spacing - expected) > 1e-12 * expected) {
    throw PreconditionError("fourier_transform: axes are not conjugate");
  }
  const double s = static_cast<double>(sign);
  ComplexVector work(n);
  ComplexVector phase(n);
  detail::linear_phase(0.0, s * from.spacing * to.origin / hbar, 1.0, phase);
  for (std::size_t i = 0; i < n; ++i) work[i] = samples[i] * phase[i];
  detail::fft_in_place(work, sign < 0 ? detail::FftDirection::forward
                                      : detail::FftDirection::backward);
  const double scale = from.spacing / std::sqrt(2.0 * std::numbers::pi * hbar);
  detail::linear_phase(s * from.origin * to.origin / hbar, s * from.origin * to.spacing / hbar, scale, phase);
  for (std::size_t m = 0; m < n; ++m) work[m] *= phase[m];
  return work;
}

MomentumWaveFunction to_momentum(const WaveFunction& psi) {
  const GridSpec& g = psi.grid();
  return {g, fourier_transform(psi.amplitudes(), g.position_axis(), g.momentum_axis(), g.hbar(), -1)};
}

ComplexVector from_momentum(const MomentumWaveFunction& phi) {
  const GridSpec& g = phi.grid;
  return fourier_transform(phi.amplitudes, g.momentum_axis(), g.position_axis(), g.hbar(), +1);
}

double squared_norm(const GridSpec& grid, std::span<const Complex> samples) {
  double acc = 0.0;
  for (const auto& v : samples) acc += std::norm(v);
  return acc * grid.dx();
}

double norm(const GridSpec& grid, std::span<const Complex> samples) {
  return std::sqrt(squared_norm(grid, samples));
}

Complex inner(const GridSpec& grid, std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc * grid.dx();
}

ComplexVector apply_momentum(const GridSpec& grid, std::span<const Complex> samples) {
  return multiply_in_momentum(grid, samples, [](double p) { return Complex{p, 0.0}; });
}

ComplexVector apply_position(const GridSpec& grid, std::span<const Complex> samples) {
  ComplexVector out(samples.begin(), samples.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= grid.x(i);
  return out;
}

ComplexVector apply_observable(const GridSpec& grid, std::span<const Complex> samples, Basis basis) {
  return basis == Basis::position ? apply_position(grid, samples) : apply_momentum(grid, samples);
}

ProbabilityDistribution distribution(const WaveFunction& psi, Basis basis) {
  const GridSpec& g = psi.grid();
  std::vector<double> weights(g.n_points());
  if (basis == Basis::position) {
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = std::norm(psi[i]);
    return {g.positions(), std::move(weights), g.dx()};
  }
  const auto phi = to_momentum(psi);
  for (std::size_t k = 0; k < weights.size(); ++k) weights[k] = std::norm(phi.amplitudes[k]);
  // Parseval holds to rounding; fold the residual back so the mass is exactly representable.
  double total = 0.0;
  for (double w : weights) total += w;
  total *= g.dp();
  for (double& w : weights) w /= total;
  return {g.momenta(), std::move(weights), g.dp()};
}

Moments moments(const WaveFunction& psi) {
  const auto px = distribution(psi, Basis::position);
  const auto pp = distribution(psi, Basis::momentum);
  return {px.mean(), std::sqrt(px.variance()), pp.mean(), std::sqrt(pp.variance())};
}

double aliasing_mass(const GridSpec& grid, const ProbabilityDistribution& momentum) {
  const double cutoff = (1.0 - kAliasingBand) * grid.nyquist();
  double acc = 0.0;
  for (std::size_t k = 0; k < momentum.size(); ++k) {
    if (std::abs(momentum.support()[k]) >= cutoff) acc += momentum.mass(k);
  }
  return acc;
}

ConfinementReport confinement(const WaveFunction& psi) {
  const GridSpec& g = psi.grid();
  const std::size_t n = g.n_points();
  double boundary = 0.0;
  for (std::size_t i = 0; i < kBoundaryPoints; ++i) {
    boundary = std::max({boundary, std::norm(psi[i]), std::norm(psi[n - 1 - i])});
  }
  boundary *= g.dx();
  return {boundary, aliasing_mass(g, distribution(psi, Basis::momentum))};
}

void require_confined(const WaveFunction& psi, std::string_view what) {
  const auto report = confinement(psi);
  if (report.ok()) return;
  std::ostringstream msg;
  msg << what << ": not confined to the grid (boundary mass " << report.boundary_mass
      << ", limit " << kBoundaryTolerance << "; near-Nyquist momentum mass "
      << report.aliasing_mass << ", limit " << kAliasingTolerance << ")";
  throw ConfinementError(msg.str());
}

void write_csv(std::ostream& out, const WaveFunction& psi) {
  out << "coordinate,re,im\n";
  for (std::size_t i = 0; i < psi.size(); ++i) {
    out << format_real(psi.grid().x(i)) << ',' << format_real(psi[i].real()) << ','
        << format_real(psi[i].imag()) << '\n';
  }
}

void write_csv(std::ostream& out, const MomentumWaveFunction& phi) {
  out << "coordinate,re,im\n";
  for (std::size_t k = 0; k < phi.amplitudes.size(); ++k) {
    out << format_real(phi.grid.p(k)) << ',' << format_real(phi.amplitudes[k].real()) << ','
        << format_real(phi.amplitudes[k].imag()) << '\n';
  }
}

void write_csv(std::ostream& out, const ProbabilityDistribution& dist) {
  out << "coordinate,weight\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out << format_real(dist.support()[i]) << ',' << format_real(dist.weights()[i]) << '\n';
  }
}

}  // namespace edlab
