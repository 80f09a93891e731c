#include "edlab/edrmetrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "edlab/error.hpp"
#include "edlab/format.hpp"
#include "edlab/wasserstein.hpp"

namespace edlab {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ComplexVector subtract(std::span<const Complex> a, std::span<const Complex> b) {
  ComplexVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

ComplexVector reversed(std::span<const Complex> v) { return ComplexVector(v.rbegin(), v.rend()); }

void require_unaliased(const GridSpec& system, const ProbabilityDistribution& momentum) {
  const double mass = aliasing_mass(system, momentum);
  if (mass >= kAliasingTolerance) {
    std::ostringstream msg;
    msg << "von_neumann: kicked system momentum reaches the aliasing band (mass " << mass
        << ", limit " << kAliasingTolerance << ")";
    throw ConfinementError(msg.str());
  }
}

// || (U^dag B_s U - B_s) Psi || evaluated with the probe in momentum representation,
// where U is the diagonal phase exp(-i g x q / hbar).
double joint_disturbance(const VonNeumannChannel& model, const WaveFunction& psi, Observable observable) {
  const auto start = embed_joint(psi, model.probe);
  const GridSpec& sg = start.system_grid();
  const GridSpec& pg = start.probe_grid();
  const std::size_t ns = sg.n_points();
  const std::size_t np = pg.n_points();
  const auto before = joint::to_probe_momentum(start.amplitudes(), sg, pg);
  auto coupled = before;
  joint::apply_coupling_phases(coupled, sg, pg, model.gain, Direction::forward);
  joint::require_probe_confined(joint::from_probe_momentum(coupled, sg, pg), sg, pg);

  // Columns to system momentum bins: the aliasing check and spectral P share this transform.
  ComplexVector kicked = coupled;
  detail::fft_columns(kicked, ns, np, detail::FftDirection::forward);
  std::vector<double> weights(ns, 0.0);
  for (std::size_t k = 0; k < ns; ++k) {
    const Complex* row = kicked.data() + ((k + ns / 2) % ns) * np;
    for (std::size_t m = 0; m < np; ++m) weights[k] += std::norm(row[m]);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total * sg.dp();
  require_unaliased(sg, ProbabilityDistribution(sg.momenta(), std::move(weights), sg.dp()));

  ComplexVector heisenberg;
  if (observable == Basis::momentum) {
    for (std::size_t m = 0; m < ns; ++m) {
      const double p = sg.p_fft(m) / static_cast<double>(ns);
      Complex* row = kicked.data() + m * np;
      for (std::size_t j = 0; j < np; ++j) row[j] *= p;
    }
    detail::fft_columns(kicked, ns, np, detail::FftDirection::backward);
    heisenberg = std::move(kicked);
  } else {
    heisenberg = joint::apply_system_observable(coupled, sg, pg, observable);
  }
  joint::apply_coupling_phases(heisenberg, sg, pg, model.gain, Direction::adjoint);
  const auto b_before = joint::apply_system_observable(before, sg, pg, observable);
  // Unnormalized probe DFT: Parseval carries a factor n_probe.
  return std::sqrt(joint::squared_norm(subtract(heisenberg, b_before), sg, pg) / static_cast<double>(np));
}

double flip_disturbance(const WaveFunction& psi, Observable observable) {
  if (!psi.grid().symmetric_about_origin()) {
    throw PreconditionError("flip: the domain must be symmetric about x = 0");
  }
  const GridSpec& g = psi.grid();
  const auto rbr = reversed(apply_observable(g, reversed(psi.amplitudes()), observable));
  const auto b = apply_observable(g, psi.amplitudes(), observable);
  return norm(g, subtract(rbr, b));
}

// Density of `observable` for the unnormalized mixture sum_m |v_m><v_m|.
ProbabilityDistribution mixture_distribution(const GridSpec& g, const std::vector<ComplexVector>& parts,
                                             Observable observable) {
  const std::size_t n = g.n_points();
  std::vector<double> weights(n, 0.0);
  for (const auto& v : parts) {
    if (observable == Basis::position) {
      for (std::size_t i = 0; i < n; ++i) weights[i] += std::norm(v[i]);
    } else {
      const auto phi = fourier_transform(v, g.position_axis(), g.momentum_axis(), g.hbar(), -1);
      for (std::size_t k = 0; k < n; ++k) weights[k] += std::norm(phi[k]);
    }
  }
  const double spacing = observable == Basis::position ? g.dx() : g.dp();
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total * spacing;
  return {observable == Basis::position ? g.positions() : g.momenta(), std::move(weights), spacing};
}

// Orthonormal coordinates of raw samples in the eigenbasis of `observable`.
ComplexVector coordinates(const GridSpec& g, std::span<const Complex> samples, Observable observable) {
  ComplexVector out;
  double scale = 0.0;
  if (observable == Basis::position) {
    out.assign(samples.begin(), samples.end());
    scale = std::sqrt(g.dx());
  } else {
    out = fourier_transform(samples, g.position_axis(), g.momentum_axis(), g.hbar(), -1);
    scale = std::sqrt(g.dp());
  }
  for (auto& c : out) c *= scale;
  return out;
}

ComplexVector samples_of_basis_vector(const GridSpec& g, std::size_t j, Observable observable) {
  const std::size_t n = g.n_points();
  if (observable == Basis::position) {
    ComplexVector e(n);
    e[j] = 1.0 / std::sqrt(g.dx());
    return e;
  }
  ComplexVector e(n);
  e[j] = 1.0 / std::sqrt(g.dp());
  return from_momentum({g, std::move(e)});
}

// sum_jk (b_k - b_j)^2 Re[conj(c_j) conj(M_kj) (M c)_k] for one block.
ComplexVector padded_spectrum(std::span<const Complex> v) {
  ComplexVector out(2 * v.size());
  std::copy(v.begin(), v.end(), out.begin());
  detail::fft_in_place(out, detail::FftDirection::forward);
  return out;
}

// `c_spectrum` is padded_spectrum(c), shared by every block.
double block_sum(const GridSpec& g, const DilationBlock& block, const ComplexVector& c,
                 const ComplexVector& c_spectrum, std::span<const Complex> psi, Observable observable) {
  const std::size_t n = g.n_points();
  const bool diagonal = !block.diagonal.empty();
  if (diagonal && observable == Basis::position) {
    // M is diagonal in the observable's own basis: only j = k terms, all weighted by zero.
    return 0.0;
  }
  const auto mc = coordinates(g, block.apply(psi), observable);

  if (diagonal) {
    // x-diagonal V is circulant in momentum: M_kj depends on d = k - j only.
    ComplexVector spectrum(block.diagonal);
    detail::fft_in_place(spectrum, detail::FftDirection::forward);
    const double dp = g.dp();
    const double x0 = g.x(0);
    const auto in = static_cast<long long>(n);
    ComplexVector m(2 * n - 1);
    const double rate = -dp * x0 / g.hbar();
    detail::linear_phase(-static_cast<double>(in - 1) * rate, rate, 1.0 / static_cast<double>(n), m);
    for (long long d = -(in - 1); d <= in - 1; ++d) {
      const auto bin = static_cast<std::size_t>(((d % in) + in) % in);
      m[static_cast<std::size_t>(d + in - 1)] *= spectrum[bin];
    }
    // With b_k - b_j = d dp the double sum regroups by d around the
    // cross-correlation C_d = sum_j conj(c_j) (Mc)_{j+d}, taken by zero-padded FFT.
    const std::size_t padded = 2 * n;
    ComplexVector a = padded_spectrum(mc);
    for (std::size_t q = 0; q < padded; ++q) a[q] *= std::conj(c_spectrum[q]);
    detail::fft_in_place(a, detail::FftDirection::backward);
    double acc = 0.0;
    for (long long d = -(in - 1); d <= in - 1; ++d) {
      const auto slot = static_cast<std::size_t>(d < 0 ? d + static_cast<long long>(padded) : d);
      const Complex corr = a[slot] / static_cast<double>(padded);
      const double db = static_cast<double>(d) * dp;
      acc += db * db * (std::conj(m[static_cast<std::size_t>(d + in - 1)]) * corr).real();
    }
    return acc;
  }

  const auto b = observable == Basis::position ? g.positions() : g.momenta();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto column = coordinates(g, block.apply(samples_of_basis_vector(g, j, observable)), observable);
    const Complex cj = std::conj(c[j]);
    for (std::size_t k = 0; k < n; ++k) {
      const double db = b[k] - b[j];
      acc += db * db * (cj * std::conj(column[k]) * mc[k]).real();
    }
  }
  return acc;
}

std::string verdict_label(Verdict v) {
  switch (v) {
    case Verdict::satisfied: return "SATISFIED";
    case Verdict::violated: return "VIOLATED";
    case Verdict::not_applicable: return "NOT APPLICABLE";
  }
  return "";
}

Relation relation(double value, double hbar_over_2, double rel_tol, bool applicable) {
  if (!applicable) return {value, value - hbar_over_2, Verdict::not_applicable};
  const Verdict v = value >= hbar_over_2 * (1.0 - rel_tol) ? Verdict::satisfied : Verdict::violated;
  return {value, value - hbar_over_2, v};
}

}  // namespace

double ozawa_error(const VonNeumannChannel& model, const WaveFunction& psi) {
  const auto start = embed_joint(psi, model.probe);
  const auto coupled = apply_von_neumann(start, model.gain, Direction::forward);
  const GridSpec& sg = start.system_grid();
  const GridSpec& pg = start.probe_grid();
  const auto readout = joint::apply_pointer_readout(coupled.amplitudes(), sg, pg, model.gain);
  const auto heisenberg = joint::conditional_shift(readout, sg, pg, model.gain, Direction::adjoint);
  const auto x_start = joint::apply_system_observable(start.amplitudes(), sg, pg, Basis::position);
  return std::sqrt(joint::squared_norm(subtract(heisenberg, x_start), sg, pg));
}

double ozawa_disturbance_kraus(const std::vector<KrausOperator>& ops, const WaveFunction& psi,
                               Observable observable) {
  const GridSpec& g = psi.grid();
  const auto b_psi = apply_observable(g, psi.amplitudes(), observable);
  double acc = 0.0;
  for (const auto& k : ops) {
    const auto bk = apply_observable(g, k.apply(psi.amplitudes()), observable);
    acc += squared_norm(g, subtract(bk, k.apply(b_psi)));
  }
  return std::sqrt(acc);
}

double ozawa_disturbance(const Channel& channel, const WaveFunction& psi, Observable observable) {
  return std::visit(
      Overloaded{[&](const FlipChannel&) { return flip_disturbance(psi, observable); },
                 [&](const SlitChannel&) {
                   return ozawa_disturbance_kraus(kraus_of(channel, psi.grid()), psi, observable);
                 },
                 [&](const VonNeumannChannel& c) { return joint_disturbance(c, psi, observable); }},
      channel);
}

double busch_state_disturbance(const Channel& channel, const WaveFunction& psi, Observable observable) {
  const auto before = distribution(psi, observable);
  const auto after = std::visit(
      Overloaded{[&](const FlipChannel&) { return distribution(apply_flip(psi), observable); },
                 [&](const SlitChannel&) {
                   std::vector<ComplexVector> parts;
                   for (const auto& k : kraus_of(channel, psi.grid())) parts.push_back(k.apply(psi.amplitudes()));
                   return mixture_distribution(psi.grid(), parts, observable);
                 },
                 [&](const VonNeumannChannel& c) {
                   const auto coupled = apply_von_neumann(embed_joint(psi, c.probe), c.gain, Direction::forward);
                   return coupled.system_marginal(observable);
                 }},
      channel);
  return wasserstein2(before, after);
}

ProbabilityDistribution pointer_readout_distribution(const VonNeumannChannel& model,
                                                     const WaveFunction& psi) {
  const auto coupled = apply_von_neumann(embed_joint(psi, model.probe), model.gain, Direction::forward);
  const auto raw = coupled.probe_marginal();
  const double g = model.gain;
  const std::size_t n = raw.size();
  std::vector<double> support(n);
  std::vector<double> weights(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = g > 0.0 ? j : n - 1 - j;
    support[j] = raw.support()[src] / g;
    weights[j] = raw.weights()[src] * std::abs(g);
  }
  return {std::move(support), std::move(weights), raw.spacing() / std::abs(g)};
}

double busch_state_error(const VonNeumannChannel& model, const WaveFunction& psi) {
  return wasserstein2(pointer_readout_distribution(model, psi), distribution(psi, Basis::position));
}

LundWisemanEstimate lund_wiseman_estimate(const Channel& channel, const WaveFunction& psi,
                                          Observable observable) {
  const GridSpec& g = psi.grid();
  const auto c = coordinates(g, psi.amplitudes(), observable);
  const auto c_spectrum = padded_spectrum(c);
  double raw = 0.0;
  for (const auto& block : dilation_blocks(channel, g)) {
    if (block.weight == 0.0) continue;
    raw += block.weight * block_sum(g, block, c, c_spectrum, psi.amplitudes(), observable);
  }
  return {std::sqrt(std::max(raw, 0.0)), raw};
}

double lund_wiseman_eta(const Channel& channel, const WaveFunction& psi, Observable observable) {
  return lund_wiseman_estimate(channel, psi, observable).eta;
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::not_applicable: return "not_applicable";
  }
  return "";
}

const char* to_string(EpsilonKind kind) {
  switch (kind) {
    case EpsilonKind::ozawa: return "ozawa";
    case EpsilonKind::slit_width: return "slit_width";
    case EpsilonKind::none: return "none";
  }
  return "";
}

RelationReport evaluate_relations(double epsilon, double eta, double delta_x, double delta_p,
                                  double hbar, bool has_measurement, double rel_tol) {
  for (double v : {epsilon, eta, delta_x, delta_p}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw PreconditionError("evaluate_relations: inputs must be finite and nonnegative");
    }
  }
  if (!std::isfinite(hbar) || !(hbar > 0.0)) throw PreconditionError("evaluate_relations: hbar must be positive");
  const double half = 0.5 * hbar;
  const bool applicable = has_measurement && !(epsilon == 0.0 && eta == 0.0);
  RelationReport out;
  out.hbar_over_2 = half;
  out.eq2_form = relation(epsilon * eta, half, rel_tol, applicable);
  out.eq5 = relation(epsilon * eta + epsilon * delta_p + eta * delta_x, half, rel_tol, applicable);
  out.robertson = relation(delta_x * delta_p, half, rel_tol, true);
  return out;
}

EDRReport make_report(const std::string& scenario, const Channel& channel, const WaveFunction& psi) {
  const auto m = moments(psi);
  EDRReport r;
  r.scenario = scenario;
  r.delta_X = m.delta_x;
  r.delta_P = m.delta_p;
  r.eta_o_P = ozawa_disturbance(channel, psi, Basis::momentum);
  r.eta_o_X = ozawa_disturbance(channel, psi, Basis::position);
  r.w2_disturbance_P = busch_state_disturbance(channel, psi, Basis::momentum);
  r.w2_disturbance_X = busch_state_disturbance(channel, psi, Basis::position);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool has_measurement = true;
  std::visit(Overloaded{[&](const FlipChannel&) {
                          r.epsilon_kind = EpsilonKind::none;
                          r.epsilon_o = 0.0;
                          r.w2_error_X = nan;
                          has_measurement = false;
                        },
                        [&](const SlitChannel& c) {
                          r.epsilon_kind = EpsilonKind::slit_width;
                          r.epsilon_o = c.width;
                          r.w2_error_X = nan;
                        },
                        [&](const VonNeumannChannel& c) {
                          r.epsilon_kind = EpsilonKind::ozawa;
                          r.epsilon_o = ozawa_error(c, psi);
                          r.w2_error_X = busch_state_error(c, psi);
                        }},
             channel);
  r.relations = evaluate_relations(r.epsilon_o, r.eta_o_P, r.delta_X, r.delta_P, psi.grid().hbar(),
                                   has_measurement);
  return r;
}

std::string csv_header() {
  return "schema,scenario,epsilon_kind,epsilon_o,eta_o_P,eta_o_X,delta_X,delta_P,w2_error_X,"
         "w2_disturbance_P,w2_disturbance_X,lhs_eq5,product_eq2_form,robertson_product,hbar_over_2,"
         "eq2_form,eq5,robertson";
}

std::string csv_row(const EDRReport& r) {
  std::ostringstream out;
  out << EDRReport::kSchema << ',' << r.scenario << ',' << to_string(r.epsilon_kind);
  for (double v : {r.epsilon_o, r.eta_o_P, r.eta_o_X, r.delta_X, r.delta_P, r.w2_error_X,
                   r.w2_disturbance_P, r.w2_disturbance_X, r.relations.eq5.value,
                   r.relations.eq2_form.value, r.relations.robertson.value, r.relations.hbar_over_2}) {
    out << ',' << format_real(v);
  }
  out << ',' << to_string(r.relations.eq2_form.verdict) << ',' << to_string(r.relations.eq5.verdict) << ','
      << to_string(r.relations.robertson.verdict);
  return out.str();
}

std::string to_json(const EDRReport& r) {
  // Values pass through the 12-digit CSV text so both formats carry the same numbers.
  auto real = [](double v) -> nlohmann::ordered_json {
    if (!std::isfinite(v)) return nullptr;
    return std::stod(format_real(v));
  };
  nlohmann::ordered_json j;
  j["schema"] = EDRReport::kSchema;
  j["scenario"] = r.scenario;
  j["epsilon_kind"] = to_string(r.epsilon_kind);
  j["epsilon_o"] = real(r.epsilon_o);
  j["eta_o_P"] = real(r.eta_o_P);
  j["eta_o_X"] = real(r.eta_o_X);
  j["delta_X"] = real(r.delta_X);
  j["delta_P"] = real(r.delta_P);
  j["w2_error_X"] = real(r.w2_error_X);
  j["w2_disturbance_P"] = real(r.w2_disturbance_P);
  j["w2_disturbance_X"] = real(r.w2_disturbance_X);
  j["lhs_eq5"] = real(r.relations.eq5.value);
  j["product_eq2_form"] = real(r.relations.eq2_form.value);
  j["robertson_product"] = real(r.relations.robertson.value);
  j["hbar_over_2"] = real(r.relations.hbar_over_2);
  j["eq2_form"] = to_string(r.relations.eq2_form.verdict);
  j["eq5"] = to_string(r.relations.eq5.verdict);
  j["robertson"] = to_string(r.relations.robertson.verdict);
  return j.dump(2);
}

void write_table(std::ostream& out, const EDRReport& r) {
  auto line = [&](const char* key, const std::string& value) {
    out << "  " << key;
    for (std::size_t pad = std::string(key).size(); pad < 22; ++pad) out << ' ';
    out << value << '\n';
  };
  out << "scenario " << r.scenario << "\n";
  out << "per-state quantities\n";
  line("epsilon_o", format_real(r.epsilon_o) + " (" + to_string(r.epsilon_kind) + ")");
  line("eta_o_P", format_real(r.eta_o_P));
  line("eta_o_X", format_real(r.eta_o_X));
  line("delta_X", format_real(r.delta_X));
  line("delta_P", format_real(r.delta_P));
  line("w2_error_X", format_real(r.w2_error_X));
  line("w2_disturbance_P", format_real(r.w2_disturbance_P));
  line("w2_disturbance_X", format_real(r.w2_disturbance_X));
  out << "relations (hbar/2 = " << format_real(r.relations.hbar_over_2) << ")\n";
  line("product_eq2_form", format_real(r.relations.eq2_form.value));
  line("lhs_eq5", format_real(r.relations.eq5.value));
  line("robertson_product", format_real(r.relations.robertson.value));
  line("Eq.2-form", verdict_label(r.relations.eq2_form.verdict));
  line("Eq.5", verdict_label(r.relations.eq5.verdict));
  line("Robertson", verdict_label(r.relations.robertson.verdict));
}

}  // namespace edlab
