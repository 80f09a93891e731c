#include "edlab/channels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "edlab/error.hpp"
#include "edlab/format.hpp"

namespace edlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Maps the ascending momentum index k onto its natural-order DFT bin.
std::size_t fft_bin(std::size_t k, std::size_t n) { return (k + n / 2) % n; }

ComplexVector shifted_pointer(const ProbeSpec& probe, double shift) {
  const GridSpec& g = probe.grid;
  return multiply_in_momentum(g, probe.ready_state.amplitudes(),
                              [&](double q) { return std::polar(1.0, -shift * q / g.hbar()); });
}

}  // namespace

ProbeSpec make_probe(const GridSpec& grid, double width) {
  if (!std::isfinite(width) || !(width > 0.0)) {
    throw PreconditionError("probe: width must be positive");
  }
  if (grid.x_min() > -grid.dx() || grid.x_max() < grid.dx()) {
    throw PreconditionError("probe: grid must contain the pointer origin");
  }
  ComplexVector amps(grid.n_points());
  for (std::size_t j = 0; j < amps.size(); ++j) {
    const double y = grid.x(j);
    amps[j] = std::exp(-y * y / (4.0 * width * width));
  }
  auto ready = WaveFunction::normalized(grid, std::move(amps));
  require_confined(ready, "probe ready state");
  const double mean = distribution(ready, Basis::position).mean();
  if (std::abs(mean) > 1e-10) {
    std::ostringstream msg;
    msg << "probe: ready state is biased (<X_probe> = " << mean << ")";
    throw InvariantError(msg.str());
  }
  return {grid, std::move(ready), width};
}

JointState::JointState(GridSpec system, GridSpec probe, ComplexVector amplitudes)
    : system_(system), probe_(probe), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != system_.n_points() * probe_.n_points()) {
    throw PreconditionError("joint state: amplitude count does not match the grids");
  }
  const double n2 = joint::squared_norm(amplitudes_, system_, probe_);
  if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "joint state: norm^2 = " << n2 << " deviates from 1";
    throw InvariantError(msg.str());
  }
}

ProbabilityDistribution JointState::system_marginal(Basis basis) const {
  const std::size_t ns = system_.n_points();
  const std::size_t np = probe_.n_points();
  std::vector<double> weights(ns, 0.0);
  if (basis == Basis::position) {
    for (std::size_t i = 0; i < ns; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < np; ++j) acc += std::norm(amplitudes_[i * np + j]);
      weights[i] = acc * probe_.dx();
    }
    return {system_.positions(), std::move(weights), system_.dx()};
  }
  ComplexVector work(amplitudes_);
  detail::fft_columns(work, ns, np, detail::FftDirection::forward);
  for (std::size_t k = 0; k < ns; ++k) {
    const Complex* row = work.data() + fft_bin(k, ns) * np;
    for (std::size_t j = 0; j < np; ++j) weights[k] += std::norm(row[j]);
  }
  // |phi_k|^2 = dx^2 / (2 pi hbar) |DFT_k|^2, integrated over the probe with dy.
  double total = 0.0;
  for (double w : weights) total += w;
  const double dp = system_.dp();
  for (double& w : weights) w /= total * dp;
  return {system_.momenta(), std::move(weights), dp};
}

ProbabilityDistribution JointState::probe_marginal() const {
  const std::size_t ns = system_.n_points();
  const std::size_t np = probe_.n_points();
  std::vector<double> weights(np, 0.0);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < np; ++j) weights[j] += std::norm(amplitudes_[i * np + j]);
  }
  for (double& w : weights) w *= system_.dx();
  return {probe_.positions(), std::move(weights), probe_.dx()};
}

double JointState::probe_boundary_mass() const {
  return joint::probe_boundary_mass(amplitudes_, system_, probe_);
}

Channel make_flip() { return FlipChannel{}; }

Channel make_slit(const GridSpec& system, double center, double width) {
  if (!std::isfinite(width) || !(width > 0.0) || !std::isfinite(center)) {
    throw PreconditionError("slit: width must be positive");
  }
  const double slack = 1e-12 * system.length();
  if (center - 0.5 * width < system.x_min() - slack || center + 0.5 * width > system.x_max() + slack) {
    throw PreconditionError("slit: aperture must lie inside the domain");
  }
  return SlitChannel{center, width};
}

Channel make_von_neumann(double gain, ProbeSpec probe) {
  if (!std::isfinite(gain) || gain == 0.0) {
    throw PreconditionError("von_neumann: gain must be finite and non-zero");
  }
  return VonNeumannChannel{gain, std::move(probe)};
}

std::string describe(const Channel& channel) {
  std::ostringstream out;
  std::visit(Overloaded{[&](const FlipChannel&) { out << "flip"; },
                        [&](const SlitChannel& c) {
                          out << "slit(center=" << c.center << ", width=" << c.width << ")";
                        },
                        [&](const VonNeumannChannel& c) {
                          out << "von_neumann(g=" << c.gain << ", s=" << c.probe.width << ")";
                        }},
             channel);
  return out.str();
}

WaveFunction apply_flip(const WaveFunction& psi) {
  const GridSpec& g = psi.grid();
  if (!g.symmetric_about_origin()) {
    throw PreconditionError("flip: the domain must be symmetric about x = 0");
  }
  const std::size_t n = g.n_points();
  ComplexVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = psi[n - 1 - i];
  return WaveFunction(g, std::move(out));
}

JointState embed_joint(const WaveFunction& psi, const ProbeSpec& probe) {
  const GridSpec& sg = psi.grid();
  const GridSpec& pg = probe.grid;
  if (sg.hbar() != pg.hbar()) throw PreconditionError("embed_joint: system and probe hbar differ");
  const std::size_t ns = sg.n_points();
  const std::size_t np = pg.n_points();
  ComplexVector amps(ns * np);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < np; ++j) amps[i * np + j] = psi[i] * probe.ready_state[j];
  }
  // The product of two unit vectors is unit to rounding; rescale so the norm check is exact.
  const double n = std::sqrt(joint::squared_norm(amps, sg, pg));
  for (auto& a : amps) a /= n;
  return JointState(sg, pg, std::move(amps));
}

JointState apply_von_neumann(const JointState& state, double gain, Direction direction) {
  if (!std::isfinite(gain) || gain == 0.0) {
    throw PreconditionError("von_neumann: gain must be finite and non-zero");
  }
  auto shifted = joint::conditional_shift(state.amplitudes(), state.system_grid(),
                                          state.probe_grid(), gain, direction);
  joint::require_probe_confined(shifted, state.system_grid(), state.probe_grid());
  return JointState(state.system_grid(), state.probe_grid(), std::move(shifted));
}

std::vector<double> slit_indicator(const GridSpec& grid, double center, double width) {
  std::vector<double> chi(grid.n_points(), 0.0);
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (std::abs(grid.x(i) - center) <= 0.5 * width) chi[i] = 1.0;
  }
  return chi;
}

SlitOutcome apply_slit(const WaveFunction& psi, double center, double width) {
  const GridSpec& g = psi.grid();
  std::get<SlitChannel>(make_slit(g, center, width));
  const auto chi = slit_indicator(g, center, width);
  ComplexVector inside(g.n_points());
  ComplexVector outside(g.n_points());
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (chi[i] > 0.0) {
      inside[i] = psi[i];
    } else {
      outside[i] = psi[i];
    }
  }
  const double p_pass = squared_norm(g, inside);
  const double p_fail = squared_norm(g, outside);
  auto branch = [&](double probability, ComplexVector amps) {
    SlitBranch b{probability, std::nullopt};
    if (probability > 0.0) b.state = WaveFunction::normalized(g, std::move(amps));
    return b;
  };
  return {branch(p_pass, std::move(inside)), branch(p_fail, std::move(outside))};
}

std::vector<KrausOperator> kraus_of(const Channel& channel, const GridSpec& system) {
  return std::visit(
      Overloaded{
          [&](const FlipChannel&) {
            if (!system.symmetric_about_origin()) {
              throw PreconditionError("flip: the domain must be symmetric about x = 0");
            }
            return std::vector<KrausOperator>{{"flip", [](std::span<const Complex> v) {
                                                 return ComplexVector(v.rbegin(), v.rend());
                                               }}};
          },
          [&](const SlitChannel& c) {
            auto chi = std::make_shared<const std::vector<double>>(slit_indicator(system, c.center, c.width));
            auto project = [chi](bool inside) {
              return [chi, inside](std::span<const Complex> v) {
                ComplexVector out(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                  if (((*chi)[i] > 0.0) == inside) out[i] = v[i];
                }
                return out;
              };
            };
            return std::vector<KrausOperator>{{"pass", project(true)}, {"fail", project(false)}};
          },
          [&](const VonNeumannChannel& c) {
            const std::size_t ns = system.n_points();
            const std::size_t np = c.probe.grid.n_points();
            auto table = std::make_shared<ComplexVector>(ns * np);
            const double root_dy = std::sqrt(c.probe.grid.dx());
            for (std::size_t i = 0; i < ns; ++i) {
              const auto row = shifted_pointer(c.probe, c.gain * system.x(i));
              for (std::size_t j = 0; j < np; ++j) (*table)[i * np + j] = root_dy * row[j];
            }
            std::vector<KrausOperator> ops;
            ops.reserve(np);
            for (std::size_t j = 0; j < np; ++j) {
              ops.push_back({"pointer[" + std::to_string(j) + "]",
                             [table, j, np](std::span<const Complex> v) {
                               ComplexVector out(v.size());
                               for (std::size_t i = 0; i < v.size(); ++i) out[i] = (*table)[i * np + j] * v[i];
                               return out;
                             }});
            }
            return ops;
          }},
      channel);
}

double kraus_completeness_deviation(const std::vector<KrausOperator>& ops,
                                    std::span<const WaveFunction> states) {
  double worst = 0.0;
  for (const auto& psi : states) {
    double total = 0.0;
    for (const auto& k : ops) total += squared_norm(psi.grid(), k.apply(psi.amplitudes()));
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

DensityOperator::DensityOperator(GridSpec grid, Eigen::MatrixXcd matrix)
    : grid_(grid), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(grid_.n_points());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw PreconditionError("density operator: matrix does not match the grid");
  }
  if (std::abs(trace() - 1.0) > kTraceTolerance) {
    std::ostringstream msg;
    msg << "density operator: trace " << trace() << " deviates from 1";
    throw InvariantError(msg.str());
  }
  const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) {
    std::ostringstream msg;
    msg << "density operator: not Hermitian (max |rho - rho^dagger| = " << asym << ")";
    throw InvariantError(msg.str());
  }
}

double DensityOperator::trace() const { return matrix_.trace().real(); }

double DensityOperator::purity() const {
  // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return matrix_.cwiseAbs2().sum();
}

Eigen::VectorXd DensityOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

void DensityOperator::check_positive() const {
  const double lowest = eigenvalues().minCoeff();
  if (lowest < kMinEigenvalue) {
    std::ostringstream msg;
    msg << "density operator: eigenvalue " << lowest << " below " << kMinEigenvalue;
    throw InvariantError(msg.str());
  }
}

DensityOperator pure_density(const WaveFunction& psi) {
  const auto n = static_cast<Eigen::Index>(psi.size());
  Eigen::VectorXcd c(n);
  const double root_dx = std::sqrt(psi.grid().dx());
  for (Eigen::Index i = 0; i < n; ++i) c(i) = psi[static_cast<std::size_t>(i)] * root_dx;
  return DensityOperator(psi.grid(), c * c.adjoint());
}

DensityOperator reduce_system(const JointState& state) {
  const auto ns = static_cast<Eigen::Index>(state.system_grid().n_points());
  const auto np = static_cast<Eigen::Index>(state.probe_grid().n_points());
  // Row-major (system, probe) buffer viewed as an ns x np coefficient matrix.
  Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> amps(
      state.amplitudes().data(), ns, np);
  const double w = state.system_grid().dx() * state.probe_grid().dx();
  Eigen::MatrixXcd rho = (amps * amps.adjoint()) * w;
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(state.system_grid(), std::move(rho));
}

DensityOperator kraus_output(const std::vector<KrausOperator>& ops, const WaveFunction& psi) {
  const auto n = static_cast<Eigen::Index>(psi.size());
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  const double root_dx = std::sqrt(psi.grid().dx());
  Eigen::VectorXcd c(n);
  for (const auto& k : ops) {
    const auto out = k.apply(psi.amplitudes());
    for (Eigen::Index i = 0; i < n; ++i) c(i) = out[static_cast<std::size_t>(i)] * root_dx;
    rho.noalias() += c * c.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityOperator(psi.grid(), std::move(rho));
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  Eigen::MatrixXcd diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

ProbabilityDistribution momentum_distribution_of(const DensityOperator& rho) {
  const std::size_t n = rho.grid().n_points();
  const auto en = static_cast<Eigen::Index>(n);
  // diag(F rho F^dagger) = diag(F (F rho)^dagger) for Hermitian rho; F is the unitary DFT.
  Eigen::MatrixXcd a = rho.matrix();
  for (Eigen::Index j = 0; j < en; ++j) {
    detail::fft_in_place(std::span<Complex>(a.col(j).data(), n), detail::FftDirection::forward);
  }
  Eigen::MatrixXcd b = a.adjoint();
  for (Eigen::Index j = 0; j < en; ++j) {
    detail::fft_in_place(std::span<Complex>(b.col(j).data(), n), detail::FftDirection::forward);
  }
  std::vector<double> weights(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto bin = static_cast<Eigen::Index>(fft_bin(k, n));
    const double prob = b(bin, bin).real() / static_cast<double>(n);
    if (prob < -1e-10) throw InvariantError("density operator: negative momentum probability");
    weights[k] = std::max(prob, 0.0);
    total += weights[k];
  }
  const double dp = rho.grid().dp();
  for (double& w : weights) w /= total * dp;
  return {rho.grid().momenta(), std::move(weights), dp};
}

ProbabilityDistribution position_distribution_of(const DensityOperator& rho) {
  const std::size_t n = rho.grid().n_points();
  std::vector<double> weights(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    weights[i] = std::max(rho.matrix()(ei, ei).real(), 0.0);
    total += weights[i];
  }
  const double dx = rho.grid().dx();
  for (double& w : weights) w /= total * dx;
  return {rho.grid().positions(), std::move(weights), dx};
}

void write_spectrum_csv(std::ostream& out, const DensityOperator& rho) {
  out << "index,eigenvalue\n";
  const auto ev = rho.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) out << i << ',' << format_real(ev(i)) << '\n';
}

std::vector<DilationBlock> dilation_blocks(const Channel& channel, const GridSpec& system) {
  return std::visit(
      Overloaded{
          [&](const FlipChannel&) {
            if (!system.symmetric_about_origin()) {
              throw PreconditionError("flip: the domain must be symmetric about x = 0");
            }
            return std::vector<DilationBlock>{
                {1.0, {}, [](std::span<const Complex> v) { return ComplexVector(v.rbegin(), v.rend()); }}};
          },
          [&](const SlitChannel& c) {
            const auto chi = slit_indicator(system, c.center, c.width);
            ComplexVector identity(chi.size(), Complex{1.0, 0.0});
            ComplexVector reflect(chi.size());
            for (std::size_t i = 0; i < chi.size(); ++i) reflect[i] = 2.0 * chi[i] - 1.0;
            auto multiply = [](ComplexVector d) {
              return [d = std::move(d)](std::span<const Complex> v) {
                ComplexVector out(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) out[i] = d[i] * v[i];
                return out;
              };
            };
            std::vector<DilationBlock> blocks;
            blocks.push_back({0.5, identity, multiply(identity)});
            blocks.push_back({0.5, reflect, multiply(reflect)});
            return blocks;
          },
          [&](const VonNeumannChannel& c) {
            const GridSpec& pg = c.probe.grid;
            const auto phi = to_momentum(c.probe.ready_state);
            std::vector<DilationBlock> blocks;
            blocks.reserve(pg.n_points());
            double total = 0.0;
            for (std::size_t k = 0; k < pg.n_points(); ++k) total += std::norm(phi.amplitudes[k]);
            for (std::size_t k = 0; k < pg.n_points(); ++k) {
              const double q = pg.p(k);
              ComplexVector d(system.n_points());
              const double rate = -c.gain * q / system.hbar();
              detail::linear_phase(rate * system.x(0), rate * system.dx(), 1.0, d);
              auto apply = [d](std::span<const Complex> v) {
                ComplexVector out(v.size());
                for (std::size_t i = 0; i < v.size(); ++i) out[i] = d[i] * v[i];
                return out;
              };
              blocks.push_back({std::norm(phi.amplitudes[k]) / total, std::move(d), std::move(apply)});
            }
            return blocks;
          }},
      channel);
}

namespace joint {
namespace {

// out[m] = scale * exp(i step q_m) for the natural-order DFT index q_m of bin m.
void phase_ramp(double step, double scale, ComplexVector& out) {
  const std::size_t n = out.size();
  std::span<Complex> all(out);
  detail::linear_phase(0.0, step, scale, all.first(n / 2));
  detail::linear_phase(-step * static_cast<double>(n / 2), step, scale, all.last(n / 2));
}

}  // namespace

ComplexVector conditional_shift(std::span<const Complex> amplitudes, const GridSpec& system,
                                const GridSpec& probe, double gain, Direction direction) {
  auto out = to_probe_momentum(amplitudes, system, probe);
  apply_coupling_phases(out, system, probe, gain, direction, 1.0 / static_cast<double>(probe.n_points()));
  detail::fft_batch(out, probe.n_points(), system.n_points(), 1, probe.n_points(),
                    detail::FftDirection::backward);
  return out;
}

ComplexVector to_probe_momentum(std::span<const Complex> amplitudes, const GridSpec& system,
                                const GridSpec& probe) {
  ComplexVector out(amplitudes.begin(), amplitudes.end());
  detail::fft_batch(out, probe.n_points(), system.n_points(), 1, probe.n_points(),
                    detail::FftDirection::forward);
  return out;
}

ComplexVector from_probe_momentum(std::span<const Complex> spectrum, const GridSpec& system,
                                  const GridSpec& probe) {
  const std::size_t np = probe.n_points();
  ComplexVector out(spectrum.begin(), spectrum.end());
  detail::fft_batch(out, np, system.n_points(), 1, np, detail::FftDirection::backward);
  const double scale = 1.0 / static_cast<double>(np);
  for (auto& v : out) v *= scale;
  return out;
}

void apply_coupling_phases(std::span<Complex> spectrum, const GridSpec& system, const GridSpec& probe,
                           double gain, Direction direction, double scale) {
  const std::size_t ns = system.n_points();
  const std::size_t np = probe.n_points();
  const double sign = direction == Direction::forward ? 1.0 : -1.0;
  const double dp = probe.dp();
  ComplexVector ramp(np);
  for (std::size_t i = 0; i < ns; ++i) {
    // Bin m carries momentum q_m dp with integer q_m; the phase is a geometric ramp.
    const double step = -sign * gain * system.x(i) * dp / probe.hbar();
    phase_ramp(step, scale, ramp);
    Complex* row = spectrum.data() + i * np;
    for (std::size_t m = 0; m < np; ++m) row[m] *= ramp[m];
  }
}

void require_probe_confined(std::span<const Complex> amplitudes, const GridSpec& system,
                            const GridSpec& probe) {
  const double boundary = probe_boundary_mass(amplitudes, system, probe);
  if (boundary >= kBoundaryTolerance) {
    std::ostringstream msg;
    msg << "von_neumann: shifted pointer reaches the probe boundary (mass " << boundary
        << ", limit " << kBoundaryTolerance << ")";
    throw ConfinementError(msg.str());
  }
}

ComplexVector apply_system_observable(std::span<const Complex> amplitudes, const GridSpec& system,
                                      const GridSpec& probe, Basis basis) {
  const std::size_t ns = system.n_points();
  const std::size_t np = probe.n_points();
  ComplexVector out(amplitudes.size());
  if (basis == Basis::position) {
    for (std::size_t i = 0; i < ns; ++i) {
      const double x = system.x(i);
      for (std::size_t j = 0; j < np; ++j) out[i * np + j] = x * amplitudes[i * np + j];
    }
    return out;
  }
  std::copy(amplitudes.begin(), amplitudes.end(), out.begin());
  detail::fft_columns(out, ns, np, detail::FftDirection::forward);
  const double scale = 1.0 / static_cast<double>(ns);
  for (std::size_t m = 0; m < ns; ++m) {
    const double p = system.p_fft(m) * scale;
    Complex* row = out.data() + m * np;
    for (std::size_t j = 0; j < np; ++j) row[j] *= p;
  }
  detail::fft_columns(out, ns, np, detail::FftDirection::backward);
  return out;
}

ComplexVector apply_pointer_readout(std::span<const Complex> amplitudes, const GridSpec& system,
                                    const GridSpec& probe, double gain) {
  const std::size_t ns = system.n_points();
  const std::size_t np = probe.n_points();
  ComplexVector out(amplitudes.size());
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < np; ++j) out[i * np + j] = (probe.x(j) / gain) * amplitudes[i * np + j];
  }
  return out;
}

double squared_norm(std::span<const Complex> amplitudes, const GridSpec& system, const GridSpec& probe) {
  double acc = 0.0;
  for (const auto& a : amplitudes) acc += std::norm(a);
  return acc * system.dx() * probe.dx();
}

double probe_boundary_mass(std::span<const Complex> amplitudes, const GridSpec& system,
                           const GridSpec& probe) {
  const std::size_t ns = system.n_points();
  const std::size_t np = probe.n_points();
  double acc = 0.0;
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t b = 0; b < kBoundaryPoints; ++b) {
      acc += std::norm(amplitudes[i * np + b]) + std::norm(amplitudes[i * np + np - 1 - b]);
    }
  }
  return acc * system.dx() * probe.dx();
}

}  // namespace joint

}  // namespace edlab
