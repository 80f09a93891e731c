#pragma once

// The processes whose error and disturbance are measured: the parity flip,
// the two-outcome slit, and the von Neumann pointer coupling exp(-i g X_s P_p / hbar)
// acting on system (x) probe.

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edlab/qgrid.hpp"

namespace edlab {

inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kMinEigenvalue = -1e-8;
inline constexpr double kKrausCompletenessTolerance = 1e-8;

/// Measuring device pointer: a centred Gaussian of position spread `width`
/// on its own grid.
struct ProbeSpec {
  GridSpec grid;
  WaveFunction ready_state;
  double width;
};

/// Throws PreconditionError for width <= 0, ConfinementError if the pointer
/// does not fit the probe grid, InvariantError if it is biased.
ProbeSpec make_probe(const GridSpec& grid, double width);

/// Amplitudes psi(x_i, y_j) stored row-major with the probe index fastest,
/// normalized as sum |psi|^2 dx dy = 1.
class JointState {
 public:
  JointState(GridSpec system, GridSpec probe, ComplexVector amplitudes);

  [[nodiscard]] const GridSpec& system_grid() const { return system_; }
  [[nodiscard]] const GridSpec& probe_grid() const { return probe_; }
  [[nodiscard]] std::span<const Complex> amplitudes() const { return amplitudes_; }
  [[nodiscard]] Complex operator()(std::size_t i, std::size_t j) const {
    return amplitudes_[i * probe_.n_points() + j];
  }

  [[nodiscard]] ProbabilityDistribution system_marginal(Basis basis) const;
  [[nodiscard]] ProbabilityDistribution probe_marginal() const;
  /// Mass in the outer kBoundaryPoints probe cells on each side.
  [[nodiscard]] double probe_boundary_mass() const;

 private:
  GridSpec system_;
  GridSpec probe_;
  ComplexVector amplitudes_;
};

enum class Direction { forward, adjoint };

struct FlipChannel {};

struct SlitChannel {
  double center;
  double width;
};

struct VonNeumannChannel {
  double gain;
  ProbeSpec probe;
};

using Channel = std::variant<FlipChannel, SlitChannel, VonNeumannChannel>;

Channel make_flip();
/// Throws PreconditionError unless width > 0 and the slit lies inside `system`.
Channel make_slit(const GridSpec& system, double center, double width);
/// Throws PreconditionError for gain == 0 or non-finite gain.
Channel make_von_neumann(double gain, ProbeSpec probe);

std::string describe(const Channel& channel);

/// psi'(x_i) = psi(x_{n-1-i}). Requires a domain symmetric about 0.
WaveFunction apply_flip(const WaveFunction& psi);

JointState embed_joint(const WaveFunction& psi, const ProbeSpec& probe);

/// Column-wise pointer translation by +g x_i (forward) or -g x_i (adjoint)
/// via probe momentum phases. Throws ConfinementError if the shifted pointer
/// reaches the probe boundary.
JointState apply_von_neumann(const JointState& state, double gain, Direction direction);

struct SlitBranch {
  double probability;
  std::optional<WaveFunction> state;  ///< Empty when the branch has zero probability.
};

struct SlitOutcome {
  SlitBranch pass;
  SlitBranch fail;
};

/// Lueders two-outcome measurement with projector onto |x - center| <= width/2.
SlitOutcome apply_slit(const WaveFunction& psi, double center, double width);

/// Indicator of the slit on the system grid (1 inside, 0 outside).
std::vector<double> slit_indicator(const GridSpec& grid, double center, double width);

struct KrausOperator {
  std::string label;
  std::function<ComplexVector(std::span<const Complex>)> apply;
};

/// flip: one unitary; slit: {Pi, 1 - Pi}; von Neumann: one operator per probe
/// pointer cell, K_j psi(x_i) = sqrt(dy) [T(g x_i) ready](y_j).
std::vector<KrausOperator> kraus_of(const Channel& channel, const GridSpec& system);

/// Max over the given states of |sum_m ||K_m psi||^2 - 1|.
double kraus_completeness_deviation(const std::vector<KrausOperator>& ops,
                                    std::span<const WaveFunction> states);

/// Unit-trace positive operator, stored as a matrix over the orthonormal grid
/// basis (coefficients c_i = psi_i sqrt(dx)).
class DensityOperator {
 public:
  /// Checks trace and Hermiticity; positivity is checked by check_positive().
  DensityOperator(GridSpec grid, Eigen::MatrixXcd matrix);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] const Eigen::MatrixXcd& matrix() const { return matrix_; }
  [[nodiscard]] double trace() const;
  [[nodiscard]] double purity() const;
  /// Ascending eigenvalues.
  [[nodiscard]] Eigen::VectorXd eigenvalues() const;
  /// Throws InvariantError when the smallest eigenvalue is below kMinEigenvalue.
  void check_positive() const;

 private:
  GridSpec grid_;
  Eigen::MatrixXcd matrix_;
};

DensityOperator pure_density(const WaveFunction& psi);
DensityOperator reduce_system(const JointState& state);
/// sum_m K_m |psi><psi| K_m^dagger.
DensityOperator kraus_output(const std::vector<KrausOperator>& ops, const WaveFunction& psi);
double trace_distance(const DensityOperator& a, const DensityOperator& b);

ProbabilityDistribution momentum_distribution_of(const DensityOperator& rho);
ProbabilityDistribution position_distribution_of(const DensityOperator& rho);

/// CSV with columns index,eigenvalue (ascending).
void write_spectrum_csv(std::ostream& out, const DensityOperator& rho);

/// One block of a controlled-unitary dilation U = sum_a |a><a| (x) V_a with
/// ancilla ready-state weight |c_a|^2. Every channel here has this form in a
/// suitable ancilla basis, which is what the weak-valued estimator uses.
struct DilationBlock {
  double weight;
  /// Position-space multiplier when V_a is diagonal in x; empty otherwise.
  ComplexVector diagonal;
  std::function<ComplexVector(std::span<const Complex>)> apply;
};

/// flip: {1, R}; slit (sigma_x eigenbasis): {1/2, 1}, {1/2, 2 Pi - 1};
/// von Neumann (probe momentum basis): {|ready(q)|^2 dq, exp(-i g q X / hbar)}.
std::vector<DilationBlock> dilation_blocks(const Channel& channel, const GridSpec& system);

/// Operations on raw joint buffers (no invariant checks); same layout as JointState.
namespace joint {

ComplexVector conditional_shift(std::span<const Complex> amplitudes, const GridSpec& system,
                                const GridSpec& probe, double gain, Direction direction);
/// Unnormalized DFT along every probe row (natural bin order), and its inverse.
ComplexVector to_probe_momentum(std::span<const Complex> amplitudes, const GridSpec& system,
                                const GridSpec& probe);
ComplexVector from_probe_momentum(std::span<const Complex> spectrum, const GridSpec& system,
                                  const GridSpec& probe);
/// The coupling is diagonal in (x, q): multiplies bin (i, m) by scale exp(-/+ i g x_i q_m / hbar).
void apply_coupling_phases(std::span<Complex> spectrum, const GridSpec& system, const GridSpec& probe,
                           double gain, Direction direction, double scale = 1.0);
/// Throws ConfinementError when probe_boundary_mass reaches kBoundaryTolerance.
void require_probe_confined(std::span<const Complex> amplitudes, const GridSpec& system,
                            const GridSpec& probe);
/// B_s (x) 1 with B = X or spectral P acting on the system index.
ComplexVector apply_system_observable(std::span<const Complex> amplitudes, const GridSpec& system,
                                      const GridSpec& probe, Basis basis);
/// 1 (x) y_j / g.
ComplexVector apply_pointer_readout(std::span<const Complex> amplitudes, const GridSpec& system,
                                    const GridSpec& probe, double gain);
double squared_norm(std::span<const Complex> amplitudes, const GridSpec& system, const GridSpec& probe);
double probe_boundary_mass(std::span<const Complex> amplitudes, const GridSpec& system,
                           const GridSpec& probe);

}  // namespace joint

}  // namespace edlab
