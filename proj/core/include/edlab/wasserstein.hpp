#pragma once

#include <span>

#include "edlab/qgrid.hpp"

namespace edlab {

/// Wasserstein-2 distance between two discrete measures on the real line,
/// given as ascending atoms with nonnegative masses of equal total.
/// Exact: integrates the squared difference of the two quantile functions.
double wasserstein2(std::span<const double> atoms_a, std::span<const double> masses_a,
                    std::span<const double> atoms_b, std::span<const double> masses_b);

/// Same, for piecewise-uniform densities: atom i spreads its mass evenly over
/// [atom_i - width/2, atom_i + width/2]. The quantile functions are then
/// piecewise linear and the integral is evaluated in closed form.
double wasserstein2_cells(std::span<const double> centers_a, std::span<const double> masses_a,
                          double width_a, std::span<const double> centers_b,
                          std::span<const double> masses_b, double width_b);

/// Reads each distribution as a density that is constant on its grid cells.
/// Lattice point masses would add about spacing^2 / 6 to W2^2 even between
/// nearby densities.
double wasserstein2(const ProbabilityDistribution& a, const ProbabilityDistribution& b);

}  // namespace edlab
