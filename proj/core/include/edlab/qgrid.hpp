#pragma once

// Discretized 1D Hilbert space: a periodic cell-centred position grid, its
// conjugate momentum grid, and the spectral (DFT) representation of P.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "edlab/detail/fft.hpp"

namespace edlab {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double kNormTolerance = 1e-10;
/// Largest |psi|^2 dx among the outermost kBoundaryPoints cells on each side.
inline constexpr double kBoundaryTolerance = 1e-10;
inline constexpr std::size_t kBoundaryPoints = 2;
/// Momentum mass allowed in the top kAliasingBand fraction of |p| below Nyquist.
inline constexpr double kAliasingTolerance = 1e-5;
inline constexpr double kAliasingBand = 0.1;
inline constexpr std::size_t kMinGridPoints = 16;

enum class Basis { position, momentum };

/// Uniform axis coordinate(i) = origin + i * spacing, i in [0, size).
struct Axis {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t size = 0;

  [[nodiscard]] double coordinate(std::size_t i) const {
    return origin + static_cast<double>(i) * spacing;
  }
};

/// Position grid x_i = x_min + (i + 1/2) dx with conjugate momentum grid
/// p_k = (k - n/2) dp, dp = 2 pi hbar / (n dx). Built through make_grid().
class GridSpec {
 public:
  [[nodiscard]] std::size_t n_points() const { return n_points_; }
  [[nodiscard]] double x_min() const { return x_min_; }
  [[nodiscard]] double x_max() const { return x_max_; }
  [[nodiscard]] double hbar() const { return hbar_; }
  [[nodiscard]] double length() const { return x_max_ - x_min_; }
  [[nodiscard]] double center() const { return 0.5 * (x_min_ + x_max_); }
  [[nodiscard]] double dx() const { return length() / static_cast<double>(n_points_); }
  [[nodiscard]] double dp() const;
  [[nodiscard]] double nyquist() const { return 0.5 * static_cast<double>(n_points_) * dp(); }

  /// Signed distance of cell i from the domain centre. Exactly antisymmetric
  /// under i -> n-1-i, which makes reflection an index permutation.
  [[nodiscard]] double offset(std::size_t i) const;
  [[nodiscard]] double x(std::size_t i) const { return center() + offset(i); }
  /// Momentum of the i-th point of the ascending momentum grid.
  [[nodiscard]] double p(std::size_t k) const;
  /// Momentum of DFT bin m in natural FFT order (m < n/2 positive, else m - n).
  [[nodiscard]] double p_fft(std::size_t m) const;

  [[nodiscard]] Axis position_axis() const;
  [[nodiscard]] Axis momentum_axis() const;
  [[nodiscard]] std::vector<double> positions() const;
  [[nodiscard]] std::vector<double> momenta() const;

  /// True when x_min = -x_max (to 1e-12 of the length).
  [[nodiscard]] bool symmetric_about_origin() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  friend GridSpec make_grid(std::size_t, double, double, double);
  GridSpec(std::size_t n, double x_min, double x_max, double hbar)
      : n_points_(n), x_min_(x_min), x_max_(x_max), hbar_(hbar) {}

  std::size_t n_points_;
  double x_min_;
  double x_max_;
  double hbar_;
};

/// Throws PreconditionError for non power-of-two n (or n < 16), x_max <= x_min, hbar <= 0.
GridSpec make_grid(std::size_t n_points, double x_min, double x_max, double hbar = 1.0);

/// Normalized pure state on a grid. The constructor checks sum |psi|^2 dx = 1
/// within kNormTolerance; confinement is checked separately (require_confined).
class WaveFunction {
 public:
  WaveFunction(GridSpec grid, ComplexVector amplitudes);

  /// Rescales to unit norm. Throws InvariantError for a zero or non-finite vector.
  static WaveFunction normalized(GridSpec grid, ComplexVector amplitudes);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::span<const Complex> amplitudes() const { return amplitudes_; }
  [[nodiscard]] std::size_t size() const { return amplitudes_.size(); }
  [[nodiscard]] Complex operator[](std::size_t i) const { return amplitudes_[i]; }

 private:
  GridSpec grid_;
  ComplexVector amplitudes_;
};

/// Momentum-space amplitudes ordered along the ascending momentum grid,
/// normalized as sum |phi_k|^2 dp = 1.
struct MomentumWaveFunction {
  GridSpec grid;
  ComplexVector amplitudes;
};

/// Nonnegative weights (densities) over an ascending uniform support;
/// sum weights * spacing = 1 within kNormTolerance.
class ProbabilityDistribution {
 public:
  ProbabilityDistribution(std::vector<double> support, std::vector<double> weights,
                          double spacing);

  [[nodiscard]] std::span<const double> support() const { return support_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] double spacing() const { return spacing_; }
  [[nodiscard]] std::size_t size() const { return support_.size(); }
  [[nodiscard]] double mass(std::size_t i) const { return weights_[i] * spacing_; }
  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;

 private:
  std::vector<double> support_;
  std::vector<double> weights_;
  double spacing_;
};

struct Moments {
  double mean_x;
  double delta_x;
  double mean_p;
  double delta_p;
};

struct ConfinementReport {
  double boundary_mass;  ///< Largest |psi|^2 dx over the outer kBoundaryPoints cells per side.
  double aliasing_mass;  ///< Momentum mass with |p| >= (1 - kAliasingBand) * nyquist.
  [[nodiscard]] bool ok() const {
    return boundary_mass < kBoundaryTolerance && aliasing_mass < kAliasingTolerance;
  }
};

/// out_m = (da / sqrt(2 pi hbar)) sum_i in_i exp(sign * i * a_i * b_m / hbar), where
/// a, b are the source and target axes. Requires da * db = 2 pi hbar / n.
ComplexVector fourier_transform(std::span<const Complex> samples, const Axis& from,
                                const Axis& to, double hbar, int sign);

MomentumWaveFunction to_momentum(const WaveFunction& psi);
/// Inverse of to_momentum; returns raw position samples on phi.grid.
ComplexVector from_momentum(const MomentumWaveFunction& phi);

/// sum |v_i|^2 dx.
double squared_norm(const GridSpec& grid, std::span<const Complex> samples);
double norm(const GridSpec& grid, std::span<const Complex> samples);
/// <a|b> = sum conj(a_i) b_i dx.
Complex inner(const GridSpec& grid, std::span<const Complex> a, std::span<const Complex> b);

/// Multiplies by f(p) in momentum space (spectral functional calculus of P).
template <class F>
ComplexVector multiply_in_momentum(const GridSpec& grid, std::span<const Complex> samples, F&& f) {
  ComplexVector work(samples.begin(), samples.end());
  detail::fft_in_place(work, detail::FftDirection::forward);
  const double scale = 1.0 / static_cast<double>(work.size());
  for (std::size_t m = 0; m < work.size(); ++m) work[m] *= f(grid.p_fft(m)) * scale;
  detail::fft_in_place(work, detail::FftDirection::backward);
  return work;
}

/// Spectral P applied to raw samples.
ComplexVector apply_momentum(const GridSpec& grid, std::span<const Complex> samples);
/// X applied to raw samples.
ComplexVector apply_position(const GridSpec& grid, std::span<const Complex> samples);
ComplexVector apply_observable(const GridSpec& grid, std::span<const Complex> samples, Basis basis);

Moments moments(const WaveFunction& psi);
ProbabilityDistribution distribution(const WaveFunction& psi, Basis basis);

ConfinementReport confinement(const WaveFunction& psi);
/// Momentum mass in the aliasing band of an ascending momentum distribution.
double aliasing_mass(const GridSpec& grid, const ProbabilityDistribution& momentum);
/// Throws ConfinementError naming `what` when the report is not ok().
void require_confined(const WaveFunction& psi, std::string_view what);

/// CSV with columns coordinate,re,im.
void write_csv(std::ostream& out, const WaveFunction& psi);
void write_csv(std::ostream& out, const MomentumWaveFunction& phi);
/// CSV with columns coordinate,weight.
void write_csv(std::ostream& out, const ProbabilityDistribution& dist);

}  // namespace edlab
