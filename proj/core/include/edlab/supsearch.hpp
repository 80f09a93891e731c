#pragma once

// Supremum search of a per-state metric over the Gaussian family
// (x0, p0, sigma): coarse scan, then coordinate-wise golden-section refinement.

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "edlab/channels.hpp"
#include "edlab/qgrid.hpp"

namespace edlab {

struct Range {
  double lo;
  double hi;
};

struct SearchSpec {
  Range x0{-1.0, 1.0};
  Range p0{-1.0, 1.0};
  Range sigma{1.0, 4.0};  ///< Log-spaced.
  std::array<std::size_t, 3> coarse_counts{3, 3, 7};
  double refine_tol = 1e-3;
  std::size_t max_refine_iters = 10;
};

/// sigma in [8 dx, length / 8], the rest of the defaults unchanged.
SearchSpec default_search_spec(const GridSpec& grid);

/// Throws PreconditionError for empty ranges, zero counts, non-positive
/// refine_tol, or sigma bounds outside [kMinCellsPerSigma dx, length / 8].
void validate(const SearchSpec& spec, const GridSpec& grid);

struct FamilyPoint {
  double x0;
  double p0;
  double sigma;
  friend auto operator<=>(const FamilyPoint&, const FamilyPoint&) = default;
};

struct TraceEntry {
  FamilyPoint params;
  double value;     ///< NaN for members excluded by state invariants.
  bool admissible;
};

struct SupResult {
  double value;
  FamilyPoint argmax;
  std::vector<TraceEntry> trace;  ///< Every evaluation, in evaluation order.
  bool lower_bound_disclaimer = true;  ///< A family maximum bounds the true supremum from below.
};

using StateMetric = std::function<double(const WaveFunction&)>;

/// Deterministic for a given spec. Throws PreconditionError when no family
/// member is admissible.
SupResult maximize(const StateMetric& metric, const GridSpec& grid, const SearchSpec& spec);

struct Eq2Check {
  SupResult error;        ///< Maximized W2 position error.
  SupResult disturbance;  ///< Maximized W2 momentum disturbance.
  double epsilon_B = 0.0;
  double eta_B = 0.0;
  double product = 0.0;
  double hbar_over_2 = 0.0;
  double slack = 0.0;  ///< product - hbar/2.
  bool argmax_differ = false;
  /// Per-state products eps * eta evaluated on one state.
  double product_at_error_argmax = 0.0;
  double product_at_disturbance_argmax = 0.0;
};

Eq2Check eq2_check(const VonNeumannChannel& model, const GridSpec& grid, const SearchSpec& spec_error,
                   const SearchSpec& spec_disturbance);

/// CSV with columns x0,p0,sigma,value.
void write_trace_csv(std::ostream& out, const SupResult& result);

}  // namespace edlab
