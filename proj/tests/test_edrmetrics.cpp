#include <doctest.h>

#include <cmath>
#include <numbers>

#include "edlab/edrmetrics.hpp"
#include "edlab/error.hpp"
#include "edlab/statelib.hpp"
#include "edlab/wasserstein.hpp"
#include "oracles.hpp"

using namespace edlab;

namespace {

const GridSpec kGrid = make_grid(256, -16.0, 16.0);

VonNeumannChannel von_neumann(double g, double s, const GridSpec& probe_grid = kGrid) {
  return std::get<VonNeumannChannel>(make_von_neumann(g, make_probe(probe_grid, s)));
}

double second_moment_x(const WaveFunction& psi) {
  const auto d = distribution(psi, Basis::position);
  return d.variance() + d.mean() * d.mean();
}

// Dense-matrix evaluation of the joint quantities on small grids.
struct DenseModel {
  GridSpec sys;
  GridSpec prb;
  double g;
  Eigen::VectorXcd psi0;  // orthonormal joint coefficients of psi (x) ready
  Eigen::MatrixXcd u;
  Eigen::MatrixXcd x_s;
  Eigen::MatrixXcd p_s;
  Eigen::MatrixXcd y_p;
  Eigen::MatrixXcd f_s;

  DenseModel(const WaveFunction& psi, const VonNeumannChannel& model)
      : sys(psi.grid()), prb(model.probe.grid), g(model.gain) {
    const auto ns = static_cast<Eigen::Index>(sys.n_points());
    const auto np = static_cast<Eigen::Index>(prb.n_points());
    const auto fp = oracle::dft_matrix(prb.positions(), prb.momenta(), prb.hbar());
    f_s = oracle::dft_matrix(sys.positions(), sys.momenta(), sys.hbar());
    u = Eigen::MatrixXcd::Zero(ns * np, ns * np);
    for (Eigen::Index i = 0; i < ns; ++i) {
      Eigen::VectorXcd phase(np);
      for (Eigen::Index k = 0; k < np; ++k) {
        phase(k) = std::polar(1.0, -g * sys.x(static_cast<std::size_t>(i)) * prb.p(static_cast<std::size_t>(k)) / sys.hbar());
      }
      u.block(i * np, i * np, np, np) = fp.adjoint() * phase.asDiagonal() * fp;
    }
    const Eigen::MatrixXcd id_p = Eigen::MatrixXcd::Identity(np, np);
    const Eigen::MatrixXcd id_s = Eigen::MatrixXcd::Identity(ns, ns);
    x_s = kron(oracle::position_matrix(sys.positions()), id_p);
    p_s = kron(oracle::momentum_matrix(sys.positions(), sys.momenta(), sys.hbar()), id_p);
    y_p = kron(id_s, oracle::position_matrix(prb.positions())) / g;
    psi0.resize(ns * np);
    for (Eigen::Index i = 0; i < ns; ++i) {
      for (Eigen::Index j = 0; j < np; ++j) {
        psi0(i * np + j) = psi[static_cast<std::size_t>(i)] * std::sqrt(sys.dx()) *
                           model.probe.ready_state[static_cast<std::size_t>(j)] * std::sqrt(prb.dx());
      }
    }
  }

  static Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
  }

  [[nodiscard]] double error() const {
    const Eigen::VectorXcd w = u.adjoint() * (y_p * (u * psi0)) - x_s * psi0;
    return w.norm();
  }

  [[nodiscard]] double disturbance() const {
    const Eigen::VectorXcd w = u.adjoint() * (p_s * (u * psi0)) - p_s * psi0;
    return w.norm();
  }

  // sum_jk (p_k - p_j)^2 Re<Psi|(Pi_j x 1) U^dag (Pi_k x 1) U|Psi>.
  [[nodiscard]] double weak_valued_disturbance() const {
    const auto ns = static_cast<Eigen::Index>(sys.n_points());
    const auto np = static_cast<Eigen::Index>(prb.n_points());
    auto project = [&](const Eigen::VectorXcd& v, Eigen::Index j) {
      Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(v.data(), ns, np);
      const Eigen::RowVectorXcd row = f_s.row(j) * m;
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out = f_s.row(j).adjoint() * row;
      return Eigen::VectorXcd(Eigen::Map<Eigen::VectorXcd>(out.data(), ns * np));
    };
    const auto p = sys.momenta();
    const Eigen::VectorXcd coupled = u * psi0;
    std::vector<Eigen::VectorXcd> before;
    for (Eigen::Index j = 0; j < ns; ++j) before.push_back(project(psi0, j));
    double acc = 0.0;
    for (Eigen::Index k = 0; k < ns; ++k) {
      const Eigen::VectorXcd a = u.adjoint() * project(coupled, k);
      for (Eigen::Index j = 0; j < ns; ++j) {
        const double d = p[static_cast<std::size_t>(k)] - p[static_cast<std::size_t>(j)];
        acc += d * d * before[static_cast<std::size_t>(j)].dot(a).real();
      }
    }
    return std::sqrt(std::max(acc, 0.0));
  }
};

WaveFunction small_gaussian(const GridSpec& g, double x0, double p0, double sigma) {
  ComplexVector v(g.n_points());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double u = g.x(i) - x0;
    v[i] = std::exp(-u * u / (4.0 * sigma * sigma)) * std::polar(1.0, p0 * g.x(i));
  }
  return WaveFunction::normalized(g, v);
}

}  // namespace

TEST_CASE("pointer error equals s / |g| for a gaussian pointer") {
  const auto psi = make_state(kGrid, GaussianSpec{0.3, 0.2, 1.0});
  CHECK(ozawa_error(von_neumann(1.0, 0.5), psi) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(ozawa_error(von_neumann(2.0, 0.5), psi) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(ozawa_error(von_neumann(-2.0, 0.5), psi) == doctest::Approx(0.25).epsilon(1e-3));
  // Sharp pointer on a finer probe grid.
  const auto sys = make_grid(512, -2.0, 2.0);
  const auto narrow = make_state(sys, GaussianSpec{0.0, 0.0, 0.125});
  CHECK(ozawa_error(von_neumann(1.0, 0.05, make_grid(1024, -4.0, 4.0)), narrow) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("coupling disturbance equals |g| hbar / (2 s)") {
  const auto psi = make_state(kGrid, GaussianSpec{0.0, 0.0, 1.0});
  CHECK(ozawa_disturbance(von_neumann(1.0, 0.5), psi, Basis::momentum) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ozawa_disturbance(von_neumann(0.5, 0.5), psi, Basis::momentum) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(ozawa_disturbance(von_neumann(1.0, 0.5), psi, Basis::position) < 1e-12);
}

TEST_CASE("kick into the aliasing band is rejected") {
  const auto psi = make_state(kGrid, GaussianSpec{0.0, 0.0, 1.0});
  const auto fine_probe = make_grid(1024, -16.0, 16.0);
  CHECK_THROWS_AS(ozawa_disturbance(von_neumann(2.0, 0.1, fine_probe), psi, Basis::momentum), ConfinementError);
}

TEST_CASE("flip disturbance is twice the root second moment") {
  for (const StateSpec& spec : {StateSpec{GaussianSpec{0.0, 0.0, 1.0}}, StateSpec{GaussianSpec{1.0, 0.4, 1.5}},
                                StateSpec{SymmetricPairSpec{4.0, 1.0}}, StateSpec{RandomSpec{3, 5}}}) {
    const auto psi = make_state(kGrid, spec);
    const double eta = ozawa_disturbance(make_flip(), psi, Basis::position);
    CHECK(eta == doctest::Approx(2.0 * std::sqrt(second_moment_x(psi))).epsilon(1e-6));
    CHECK(eta >= 2.0 * moments(psi).delta_x * (1.0 - 1e-12));
  }
  CHECK(ozawa_disturbance(make_flip(), make_state(kGrid, GaussianSpec{0.0, 0.0, 1.0}), Basis::position) ==
        doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("slit on an interior bump: momentum leakage of the spectral operator") {
  // Pi psi = psi exactly, but spectral P spreads the bump's kink outside the
  // slit, so the Kraus form sees a small residual that shrinks with resolution.
  double previous = 1.0;
  for (std::size_t n : {256u, 512u, 1024u}) {
    const auto g = make_grid(n, -16.0, 16.0);
    const auto psi = make_state(g, BumpSpec{0.0, 1.0});
    const double eta = ozawa_disturbance(make_slit(g, 0.0, 4.0), psi, Basis::momentum);
    CHECK(eta < previous / 3.5);
    previous = eta;
  }
  CHECK(previous < 5e-4);
  const auto psi = make_state(kGrid, BumpSpec{0.0, 1.0});
  CHECK(ozawa_disturbance(make_slit(kGrid, 0.0, 4.0), psi, Basis::position) == 0.0);
}

TEST_CASE("joint form matches dense matrices") {
  const auto sys = make_grid(16, -4.0, 4.0);
  const auto model = von_neumann(1.0, 0.6, make_grid(64, -12.0, 12.0));
  const auto psi = small_gaussian(sys, 0.3, 0.5, 0.8);
  const DenseModel dense(psi, model);
  CHECK(ozawa_error(model, psi) == doctest::Approx(dense.error()).epsilon(1e-10));
  CHECK(ozawa_disturbance(Channel{model}, psi, Basis::momentum) == doctest::Approx(dense.disturbance()).epsilon(1e-10));
  CHECK(lund_wiseman_eta(Channel{model}, psi, Basis::momentum) ==
        doctest::Approx(dense.weak_valued_disturbance()).epsilon(1e-9));
  CHECK(dense.weak_valued_disturbance() == doctest::Approx(dense.disturbance()).epsilon(1e-9));
}

TEST_CASE("Kraus and joint forms agree for the coupling") {
  const auto sys = make_grid(32, -4.0, 4.0);
  const auto model = von_neumann(1.0, 0.5, make_grid(64, -8.0, 8.0));
  const auto psi = small_gaussian(sys, -0.2, 0.3, 0.7);
  const double joint = ozawa_disturbance(Channel{model}, psi, Basis::momentum);
  const double kraus = ozawa_disturbance_kraus(kraus_of(Channel{model}, sys), psi, Basis::momentum);
  CHECK(kraus == doctest::Approx(joint).epsilon(1e-7));
}

TEST_CASE("distribution disturbance") {
  const auto even = make_state(kGrid, SymmetricPairSpec{3.0, 1.0});
  CHECK(busch_state_disturbance(make_flip(), even, Basis::position) < 1e-8);
  const auto moved = make_state(kGrid, GaussianSpec{1.0, 0.0, 1.0});
  CHECK(busch_state_disturbance(make_flip(), moved, Basis::position) == doctest::Approx(2.0).epsilon(1e-3));
  const auto bump = make_state(kGrid, BumpSpec{0.0, 1.0});
  CHECK(busch_state_disturbance(make_slit(kGrid, 0.0, 4.0), bump, Basis::momentum) < 1e-8);
  CHECK(busch_state_disturbance(make_slit(kGrid, 0.0, 4.0), bump, Basis::position) < 1e-8);
  // Gaussian kick: sqrt(dP^2 + eta^2) - dP.
  const auto psi = make_state(kGrid, GaussianSpec{0.0, 0.0, 1.0});
  CHECK(busch_state_disturbance(Channel{von_neumann(1.0, 0.5)}, psi, Basis::momentum) ==
        doctest::Approx(std::sqrt(1.25) - 0.5).epsilon(1e-2));
}

TEST_CASE("readout distribution matches the convolution oracle") {
  const auto sys = make_grid(512, -2.0, 2.0);
  const auto probe_grid = make_grid(1024, -4.0, 4.0);
  const double s = 0.5;
  const auto model = von_neumann(1.0, s, probe_grid);
  const auto psi = make_state(sys, GaussianSpec{0.0, 0.0, 0.0625});
  const auto readout = pointer_readout_distribution(model, psi);

  std::vector<double> expected(probe_grid.n_points(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < expected.size(); ++j) {
    for (std::size_t i = 0; i < sys.n_points(); ++i) {
      const double u = probe_grid.x(j) - sys.x(i);
      expected[j] += std::norm(psi[i]) * std::exp(-u * u / (2.0 * s * s));
    }
    total += expected[j];
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < expected.size(); ++j) {
    worst = std::max(worst, std::abs(readout.mass(j) - expected[j] / total));
  }
  CHECK(worst < 1e-10);

  std::vector<double> ideal(sys.n_points());
  for (std::size_t i = 0; i < ideal.size(); ++i) ideal[i] = std::norm(psi[i]) * sys.dx();
  for (auto& e : expected) e /= total;
  const double oracle_w2 = oracle::sampled_w2(probe_grid.positions(), expected, probe_grid.dx(), sys.positions(),
                                              ideal, sys.dx());
  const double w2 = busch_state_error(model, psi);
  CHECK(w2 == doctest::Approx(oracle_w2).epsilon(1e-4));
  CHECK(w2 == doctest::Approx(std::sqrt(0.0625 * 0.0625 + s * s) - 0.0625).epsilon(1e-3));
}

TEST_CASE("readout error shrinks with a sharper pointer and stays even") {
  const auto sys = make_grid(512, -4.0, 4.0);
  const auto probe_grid = make_grid(2048, -8.0, 8.0);
  const auto psi = make_state(sys, SymmetricPairSpec{1.0, 0.25});
  double previous = 1.0;
  for (double s : {0.4, 0.2, 0.1, 0.05}) {
    const auto model = von_neumann(1.0, s, probe_grid);
    const double e = busch_state_error(model, psi);
    CHECK(e < previous);
    CHECK(e <= s);
    previous = e;
    const auto r = pointer_readout_distribution(model, psi);
    for (std::size_t j = 0; j < r.size(); ++j) {
      CHECK(r.weights()[j] == doctest::Approx(r.weights()[r.size() - 1 - j]).epsilon(1e-9).scale(1e-9));
    }
  }
  CHECK(previous < 0.01);
}

TEST_CASE("weak-valued estimator reproduces the RMS disturbance") {
  const auto probe = make_probe(kGrid, 0.5);
  const Channel channels[] = {make_flip(), make_slit(kGrid, 0.2, 3.0), make_von_neumann(1.0, probe)};
  const auto corpus = random_corpus(kGrid, 7, 40, 5);
  int pairs = 0;
  for (const auto& c : channels) {
    for (const auto& psi : corpus) {
      for (auto b : {Basis::momentum, Basis::position}) {
        const double eta = ozawa_disturbance(c, psi, b);
        const auto lw = lund_wiseman_estimate(c, psi, b);
        if (eta > 1e-9) {
          CHECK(lw.eta == doctest::Approx(eta).epsilon(1e-6));
        } else {
          CHECK(lw.eta < 1e-6);
        }
        ++pairs;
      }
    }
  }
  CHECK(pairs >= 20);
  const auto g = make_state(kGrid, GaussianSpec{0.0, 0.0, 1.0});
  CHECK(lund_wiseman_eta(make_flip(), g, Basis::position) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("relation evaluation") {
  SUBCASE("slit with zero disturbance violates the product form only") {
    const auto r = evaluate_relations(4.0, 0.0, 0.2829, 1.8138, 1.0);
    CHECK(r.eq2_form.value == 0.0);
    CHECK(r.eq2_form.verdict == Verdict::violated);
    CHECK(r.eq5.value == doctest::Approx(4.0 * 1.8138));
    CHECK(r.eq5.verdict == Verdict::satisfied);
    CHECK(r.robertson.verdict == Verdict::satisfied);
  }
  SUBCASE("gaussian pointer saturates the product form") {
    const auto r = evaluate_relations(0.5, 1.0, 1.0, 0.5, 1.0);
    CHECK(r.eq2_form.value == doctest::Approx(0.5));
    CHECK(r.eq2_form.slack == doctest::Approx(0.0));
    CHECK(r.eq2_form.verdict == Verdict::satisfied);
    CHECK(r.eq5.slack > 0.0);
  }
  SUBCASE("no error and no disturbance is not a measurement") {
    const auto r = evaluate_relations(0.0, 0.0, 1.0, 0.5, 1.0);
    CHECK(r.eq5.value == 0.0);
    CHECK(r.eq5.verdict == Verdict::not_applicable);
    CHECK(r.eq2_form.verdict == Verdict::not_applicable);
    CHECK(r.robertson.verdict == Verdict::satisfied);
  }
  SUBCASE("gap between the two forms is nonnegative") {
    for (double e : {0.0, 0.1, 2.0}) {
      for (double n : {0.0, 0.3, 5.0}) {
        const auto r = evaluate_relations(e, n, 0.7, 0.9, 1.0);
        CHECK(r.eq5.value - r.eq2_form.value >= 0.0);
      }
    }
  }
  CHECK_THROWS_AS(evaluate_relations(-1.0, 0.0, 1.0, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(evaluate_relations(1.0, std::nan(""), 1.0, 1.0, 1.0), PreconditionError);
  CHECK(std::string(to_string(Verdict::not_applicable)) == "not_applicable");
}

TEST_CASE("report serialization") {
  const auto r = make_report("vonneumann", Channel{von_neumann(1.0, 0.5)}, make_state(kGrid, GaussianSpec{}));
  CHECK(r.epsilon_kind == EpsilonKind::ozawa);
  CHECK(r.relations.eq5.value >= r.relations.eq2_form.value);
  CHECK(csv_header().rfind("schema,scenario,epsilon_kind,epsilon_o,eta_o_P,eta_o_X,delta_X,delta_P,w2_error_X,", 0) == 0);
  const auto row = csv_row(r);
  CHECK(row.rfind("edr-1,vonneumann,ozawa,0.5,", 0) == 0);
  const auto json = to_json(r);
  CHECK(json.find("\"epsilon_o\": 0.5") != std::string::npos);

  const auto flip = make_report("flip", make_flip(), make_state(kGrid, GaussianSpec{}));
  CHECK(csv_row(flip).find(",nan,") != std::string::npos);
  CHECK(to_json(flip).find("\"w2_error_X\": null") != std::string::npos);
  CHECK(flip.relations.eq5.verdict == Verdict::not_applicable);
}
