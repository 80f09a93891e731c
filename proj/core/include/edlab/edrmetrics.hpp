#pragma once

// Error and disturbance functionals: the operator (RMS) definitions, the
// distribution-distance definitions, the weak-valued estimator, and the
// inequalities they are tested against.

#include <iosfwd>
#include <string>

#include "edlab/channels.hpp"
#include "edlab/qgrid.hpp"

namespace edlab {

using Observable = Basis;

/// ||(U^dag (1 (x) Y/g) U - X (x) 1) (psi (x) ready)||.
/// Throws ConfinementError if the shifted pointer reaches the probe boundary.
double ozawa_error(const VonNeumannChannel& model, const WaveFunction& psi);

/// RMS disturbance of `observable`: unitary form for the flip, Kraus form for
/// the slit, joint form for the von Neumann coupling. The joint form throws
/// ConfinementError when the kicked system momentum reaches the aliasing band.
double ozawa_disturbance(const Channel& channel, const WaveFunction& psi, Observable observable);

/// (sum_m ||(B K_m - K_m B) psi||^2)^(1/2) for an arbitrary Kraus set.
double ozawa_disturbance_kraus(const std::vector<KrausOperator>& ops, const WaveFunction& psi,
                               Observable observable);

/// W2 between the distribution of `observable` before and after the
/// non-selective channel.
double busch_state_disturbance(const Channel& channel, const WaveFunction& psi, Observable observable);

/// W2 between the calibrated pointer readout Y/g and the position distribution of psi.
double busch_state_error(const VonNeumannChannel& model, const WaveFunction& psi);

/// Distribution of the calibrated readout Y/g after the coupling.
ProbabilityDistribution pointer_readout_distribution(const VonNeumannChannel& model,
                                                     const WaveFunction& psi);

struct LundWisemanEstimate {
  double eta;          ///< sqrt(max(raw_squared, 0)).
  double raw_squared;  ///< Unclamped sum; may dip below zero by rounding.
};

/// eta^2 = sum_jk (b_k - b_j)^2 Re<Psi|(Pi_j (x) 1) U^dag (Pi_k (x) 1) U|Psi>,
/// one bin per grid point of the observable.
LundWisemanEstimate lund_wiseman_estimate(const Channel& channel, const WaveFunction& psi,
                                          Observable observable);
double lund_wiseman_eta(const Channel& channel, const WaveFunction& psi, Observable observable);

enum class Verdict { satisfied, violated, not_applicable };
const char* to_string(Verdict verdict);

struct Relation {
  double value;
  double slack;  ///< value - hbar/2.
  Verdict verdict;
};

struct RelationReport {
  Relation eq5;        ///< eps eta + eps dP + eta dX.
  Relation eq2_form;   ///< eps eta.
  Relation robertson;  ///< dX dP.
  double hbar_over_2;
};

/// Relative tolerance used when a value is compared against hbar/2.
inline constexpr double kRelationTolerance = 1e-6;

/// Throws PreconditionError for negative or non-finite inputs. When
/// `has_measurement` is false, or eps = eta = 0, the measurement relations are
/// not_applicable (the channel carries no position information).
RelationReport evaluate_relations(double epsilon, double eta, double delta_x, double delta_p,
                                  double hbar, bool has_measurement = true,
                                  double rel_tol = kRelationTolerance);

enum class EpsilonKind { ozawa, slit_width, none };
const char* to_string(EpsilonKind kind);

struct EDRReport {
  static constexpr const char* kSchema = "edr-1";

  std::string scenario;
  EpsilonKind epsilon_kind = EpsilonKind::none;
  double epsilon_o = 0.0;
  double eta_o_P = 0.0;
  double eta_o_X = 0.0;
  double delta_X = 0.0;
  double delta_P = 0.0;
  double w2_error_X = 0.0;
  double w2_disturbance_P = 0.0;
  double w2_disturbance_X = 0.0;
  RelationReport relations{};
};

/// Evaluates every per-state quantity of `channel` on `psi`.
EDRReport make_report(const std::string& scenario, const Channel& channel, const WaveFunction& psi);

std::string csv_header();
std::string csv_row(const EDRReport& report);
std::string to_json(const EDRReport& report);
/// Fixed-order human-readable table.
void write_table(std::ostream& out, const EDRReport& report);

}  // namespace edlab
