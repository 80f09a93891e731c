#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "edlab/qgrid.hpp"

namespace edlab {

inline constexpr double kMinCellsPerSigma = 8.0;
inline constexpr double kGaussianMarginSigmas = 4.0;
inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr int kMaxRandomOrder = 12;

/// Gaussian amplitude with position standard deviation sigma (|psi|^2 ~ N(x0, sigma^2))
/// and mean momentum p0.
struct GaussianSpec {
  double x0 = 0.0;
  double p0 = 0.0;
  double sigma = 1.0;
};

/// cos^2(pi (x - center) / (2 halfwidth)) on |x - center| < halfwidth, exactly zero elsewhere.
struct BumpSpec {
  double center = 0.0;
  double halfwidth = 1.0;
};

/// Two equal Gaussians at centre +- separation/2, even about the domain centre.
struct SymmetricPairSpec {
  double separation = 4.0;
  double sigma = 1.0;
};

/// Gaussian envelope times a random complex superposition of Hermite functions
/// of order 0..smoothness, with a small random displacement and boost.
struct RandomSpec {
  std::uint64_t seed = 1;
  int smoothness = 3;
};

using StateSpec = std::variant<GaussianSpec, BumpSpec, SymmetricPairSpec, RandomSpec>;

/// Builds a normalized, confined state. Throws PreconditionError when the
/// feature does not fit or is unresolved, ConfinementError when the sampled
/// state leaks into the boundary or the near-Nyquist band.
WaveFunction make_state(const GridSpec& grid, const StateSpec& spec);

struct SymmetryReport {
  bool symmetric;
  double asymmetry;  ///< ||psi(x) - psi(2 about - x)||
};

/// `about` must be the domain centre, where reflection is an index permutation.
SymmetryReport is_symmetric(const WaveFunction& psi, double about);

std::string describe(const StateSpec& spec);

/// `count` random states with seeds base_seed, base_seed + 1, ...
std::vector<WaveFunction> random_corpus(const GridSpec& grid, std::size_t count,
                                        std::uint64_t base_seed, int smoothness);

}  // namespace edlab
