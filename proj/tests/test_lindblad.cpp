#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "qfes/lindblad.hpp"
#include "qfes/rng.hpp"

using namespace qfes;
using cxd = std::complex<double>;

namespace {

DensityMatrix<> plus_x_state() {
  ComplexVector<> v(2);
  v << cxd(1, 0), cxd(1, 0);
  return DensityMatrix<>::from_pure(StateVector<>::from_amplitudes(v));
}

ComplexMatrix<> random_hermitian(Index d, RandomStream& rng) {
  ComplexMatrix<> a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = cxd(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return ComplexMatrix<>((a + a.adjoint()) / 2);
}

DensityMatrix<> random_density(Index d, RandomStream& rng) {
  ComplexMatrix<> a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = cxd(rng.uniform(-1, 1), rng.uniform(-1, 1));
  ComplexMatrix<> rho = a * a.adjoint();
  rho /= rho.trace();
  return DensityMatrix<>::from_matrix(rho);
}

}  // namespace

TEST_CASE("pure dephasing: off-diagonal decays as exp(-nu t), diagonal untouched") {
  const double nu = 0.8;
  auto model = LindbladModel<>::make(ComplexMatrix<>::Zero(2, 2), {{dephasing_collapse(), nu}});
  auto rho = plus_x_state();
  const double dt = 1e-3;
  for (int s = 1; s <= 2000; ++s) {
    rho = gkls_step(rho, model, dt);
    if (s % 400 == 0) {
      const double t = s * dt;
      CHECK(std::abs(rho.matrix()(0, 1).real() - 0.5 * std::exp(-nu * t)) <= 1e-8);
      CHECK(std::abs(rho.matrix()(0, 0).real() - 0.5) <= 1e-10);
      CHECK(std::abs(rho.matrix()(1, 1).real() - 0.5) <= 1e-10);
    }
  }
}

TEST_CASE("relaxation from |1><1|: population decays as exp(-nu t)") {
  const double nu = 1.3;
  auto model = LindbladModel<>::make(ComplexMatrix<>::Zero(2, 2), {{sigma_minus(), nu}});
  auto rho = DensityMatrix<>::from_pure(StateVector<>::basis_state(1, 1));
  const double dt = 1e-3;
  for (int s = 1; s <= 3000; ++s) {
    rho = gkls_step(rho, model, dt);
    if (s % 600 == 0)
      CHECK(std::abs(rho.matrix()(1, 1).real() - std::exp(-nu * s * dt)) <= 1e-8);
  }
  CHECK(std::abs(rho.trace() - 1.0) <= 1e-9);
}

TEST_CASE("zero rates reduce to unitary von Neumann evolution") {
  RandomStream rng(3);
  auto h = random_hermitian(4, rng);
  auto model = LindbladModel<>::closed(h);
  auto rho = random_density(4, rng);
  const double p0 = rho.purity();
  const double dt = 1e-3 / model.generator_norm() * 0.05;
  for (int s = 0; s < 500; ++s) rho = gkls_step(rho, model, std::min(dt, 1e-3));
  CHECK(std::abs(rho.purity() - p0) <= 1e-8);
  CHECK(std::abs(rho.trace() - 1.0) <= 1e-9);
}

TEST_CASE("step guard trips on oversized steps") {
  auto model = LindbladModel<>::make(10.0 * sigma_z(), {{sigma_minus(), 5.0}});
  auto rho = DensityMatrix<>::maximally_mixed(2);
  CHECK_THROWS_AS(gkls_step(rho, model, 1.0), std::invalid_argument);
}

TEST_CASE("RK4 matches the exact superoperator exponential at small dimension") {
  RandomStream rng(17);
  for (Index d : {Index(2), Index(4), Index(8)}) {
    std::vector<CollapseTerm<>> terms;
    for (int k = 0; k < 2; ++k) {
      ComplexMatrix<> l(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) l(i, j) = cxd(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      terms.push_back({l, 0.3 + 0.2 * k});
    }
    auto model = LindbladModel<>::make(random_hermitian(d, rng), terms);
    auto rho0 = random_density(d, rng);

    const double t = 0.5;
    auto sup = gkls_superoperator(model);
    ComplexMatrix<> prop = (sup * t).exp();
    ComplexVector<> vec0(d * d);
    for (Index c = 0; c < d; ++c) vec0.segment(c * d, d) = rho0.matrix().col(c);
    ComplexVector<> vec1 = prop * vec0;
    ComplexMatrix<> expected(d, d);
    for (Index c = 0; c < d; ++c) expected.col(c) = vec1.segment(c * d, d);

    auto evolved = gkls_evolve(rho0, model, t, 1e-3);
    CHECK((evolved.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("CPTP numerics hold over 1000 steps for a random model") {
  RandomStream rng(29);
  const Index d = 16;
  std::vector<CollapseTerm<>> terms;
  for (int k = 0; k < 3; ++k) {
    ComplexMatrix<> l(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) l(i, j) = cxd(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    terms.push_back({l, 0.1});
  }
  auto model = LindbladModel<>::make(random_hermitian(d, rng), terms);
  auto rho = random_density(d, rng);
  const double dt = std::min(1e-3, 0.05 / model.generator_norm());
  for (int s = 0; s < 1000; ++s) rho = gkls_step(rho, model, dt);
  CHECK(std::abs(rho.trace() - 1.0) <= 1e-8);
  CHECK(rho.min_eigenvalue() >= -1e-6);
  CHECK(rho.hermiticity_defect() <= 1e-12);
}

TEST_CASE("general rate matrix is diagonalized; non-CP input rejected") {
  RandomStream rng(31);
  std::vector<ComplexMatrix<>> basis = {sigma_minus(), dephasing_collapse()};

  ComplexMatrix<> a(2, 2);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) a(i, j) = cxd(rng.uniform(-1, 1), rng.uniform(-1, 1));
  ComplexMatrix<> gamma = a * a.adjoint();  // PSD by construction

  auto model = LindbladModel<>::from_rate_matrix(ComplexMatrix<>::Zero(2, 2), basis, gamma);
  auto rho = random_density(2, rng);

  // Oracle: the double-sum form evaluated directly.
  ComplexMatrix<> direct = ComplexMatrix<>::Zero(2, 2);
  for (Index j = 0; j < 2; ++j)
    for (Index k = 0; k < 2; ++k) {
      const auto& lj = basis[static_cast<std::size_t>(j)];
      const auto& lk = basis[static_cast<std::size_t>(k)];
      direct += gamma(j, k) * (lj * rho.matrix() * lk.adjoint() -
                               0.5 * (lk.adjoint() * lj * rho.matrix() + rho.matrix() * lk.adjoint() * lj));
    }
  CHECK((gkls_rhs(rho.matrix(), model) - direct).cwiseAbs().maxCoeff() <= 1e-10);

  ComplexMatrix<> bad = gamma;
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(LindbladModel<>::from_rate_matrix(ComplexMatrix<>::Zero(2, 2), basis, bad),
                  std::invalid_argument);
}

TEST_CASE("identity channel leaves the state untouched") {
  RandomStream rng(5);
  auto rho = random_density(4, rng);
  QuantumChannel<> id{{ComplexMatrix<>::Identity(4, 4)}};
  CHECK((apply_channel(rho, id).matrix() - rho.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("depolarizing channel mixes toward I/D") {
  RandomStream rng(7);
  for (Index d : {Index(2), Index(4)}) {
    auto rho = random_density(d, rng);
    for (double p : {0.0, 0.3, 1.0}) {
      auto ch = depolarizing_channel(d, p);
      CHECK(ch.completeness_defect() <= 1e-10);
      auto out = apply_channel(rho, ch);
      ComplexMatrix<> expected =
          (1 - p) * rho.matrix() + (p / static_cast<double>(d)) * ComplexMatrix<>::Identity(d, d);
      CHECK((out.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("full dephasing projects onto the diagonal classical PDF") {
  RandomStream rng(9);
  auto rho = random_density(8, rng);
  auto out = apply_channel(rho, full_dephasing_channel(8));
  CHECK((out.matrix() - ComplexMatrix<>(rho.matrix().diagonal().asDiagonal())).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("unital channels never increase purity; I/D is a fixed point") {
  RandomStream rng(11);
  auto rho = random_density(2, rng);
  for (int s = 0; s < 10; ++s) {
    const double before = rho.purity();
    rho = apply_channel(rho, depolarizing_channel<double>(2, 0.15));
    CHECK(rho.purity() <= before + 1e-9);
    const double b2 = rho.purity();
    rho = apply_channel(rho, dephasing_channel(0.9));
    CHECK(rho.purity() <= b2 + 1e-9);
  }
  auto mixed = DensityMatrix<>::maximally_mixed(2);
  CHECK((apply_channel(mixed, depolarizing_channel<double>(2, 0.7)).matrix() - mixed.matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  CHECK((apply_channel(mixed, dephasing_channel(0.4)).matrix() - mixed.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dephasing channel with lambda = exp(-nu t) equals GKLS integration") {
  const double nu = 0.6, t = 1.2;
  auto rho0 = plus_x_state();
  auto via_channel = apply_channel(rho0, dephasing_channel(std::exp(-nu * t)));
  auto model = LindbladModel<>::make(ComplexMatrix<>::Zero(2, 2), {{dephasing_collapse(), nu}});
  auto via_ode = gkls_evolve(rho0, model, t, 1e-3);
  CHECK((via_channel.matrix() - via_ode.matrix()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("incomplete Kraus sets are rejected") {
  QuantumChannel<> bad{{0.5 * ComplexMatrix<>::Identity(2, 2)}};
  CHECK_THROWS_AS(apply_channel(DensityMatrix<>::maximally_mixed(2), bad), std::invalid_argument);
}

TEST_CASE("noisy run with zero rates tracks the ideal circuit exactly") {
  Circuit<> c;
  c.n_qubits = 2;
  c.push(Gate<>::h(0));
  c.push(Gate<>::cnot(0, 1));
  c.push(Gate<>::rz(1, 0.7));
  GateNoiseProfile<> quiet;
  auto res = noisy_circuit_run(DensityMatrix<>::from_pure(StateVector<>::zero_state(2)), c, quiet);
  for (Index i = 0; i < res.fidelity_vs_ideal.size(); ++i)
    CHECK(std::abs(res.fidelity_vs_ideal[i] - 1.0) <= 1e-9);
}

TEST_CASE("gate-enhanced dephasing triples the fidelity decay rate of H chains") {
  Circuit<> c;
  c.n_qubits = 1;
  for (int i = 0; i < 8; ++i) c.push(Gate<>::h(0));

  GateNoiseProfile<> base;
  base.dephase_rate = 0.02;
  base.gate_duration = 1.0;

  GateNoiseProfile<> enhanced = base;
  enhanced.gate_dephase_multiplier = 3.0;

  auto rho0 = DensityMatrix<>::from_pure(StateVector<>::zero_state(1));
  auto r1 = noisy_circuit_run(rho0, c, base);
  auto r3 = noisy_circuit_run(rho0, c, enhanced);

  // Analytic single-qubit solution: after 2k gates the fidelity to |0> is
  // (1 + exp(-nu_eff k tau))/2, coherence decaying only in the superposition
  // half of each H pair.
  for (int k = 1; k <= 4; ++k) {
    const double f_expect = 0.5 * (1 + std::exp(-base.dephase_rate * k * base.gate_duration));
    CHECK(std::abs(r1.fidelity_vs_ideal[2 * k - 1] - f_expect) <= 1e-6);
    const double f3_expect = 0.5 * (1 + std::exp(-3 * base.dephase_rate * k * base.gate_duration));
    CHECK(std::abs(r3.fidelity_vs_ideal[2 * k - 1] - f3_expect) <= 1e-6);
  }
  // Rate ratio extracted from the coherence factor is 3.
  const double rate1 = -std::log(2 * r1.fidelity_vs_ideal[7] - 1) / 4.0;
  const double rate3 = -std::log(2 * r3.fidelity_vs_ideal[7] - 1) / 4.0;
  CHECK(rate3 / rate1 == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("localized states resist dephasing; superpositions do not") {
  const int n = 2;
  Circuit<> idle;
  idle.n_qubits = n;
  for (int i = 0; i < 6; ++i) idle.push(Gate<>::z(0));  // basis-preserving placeholder depth

  GateNoiseProfile<> noisy;
  noisy.dephase_rate = 0.05;

  auto localized = DensityMatrix<>::from_pure(StateVector<>::basis_state(n, 2));
  auto spread = DensityMatrix<>::from_pure(StateVector<>::uniform_superposition(n));

  auto rl = noisy_circuit_run(localized, idle, noisy);
  auto rs = noisy_circuit_run(spread, idle, noisy);
  for (Index i = 1; i < rl.fidelity_vs_ideal.size(); ++i) {
    CHECK(rl.fidelity_vs_ideal[i] >= 1.0 - 1e-9);
    CHECK(rs.fidelity_vs_ideal[i] < rl.fidelity_vs_ideal[i]);
  }
}
