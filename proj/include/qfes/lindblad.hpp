// lindblad.hpp
// GKLS master-equation integration in the diagonal form
//   d(rho)/dt = [H, rho]/(i hbar) + sum_a nu_a (L_a rho L_a^+ - {L_a^+ L_a, rho}/2),
// CPTP channel application in Kraus form, and the gate-based noise model that
// interleaves exact gate unitaries with decoherence segments.
//
// Qubit collapse conventions (fixed here, mirroring the oscillator operators:
// destruction for relaxation, creation for excitation, number for dephasing):
//   relaxation L = sigma_minus, excitation L = sigma_plus,
//   dephasing  L = sigma_z / sqrt(2).

#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "qfes/qstate.hpp"
#include "qfes/types.hpp"

namespace qfes {

// ---------------------------------------------------------------------------
// Model

template <typename Real = double>
struct CollapseTerm {
  ComplexMatrix<Real> op;
  Real rate;  // nu_a >= 0
};

template <typename Real = double>
struct LindbladModel {
  ComplexMatrix<Real> hamiltonian;  // Hermitian, hbar = 1 units
  std::vector<CollapseTerm<Real>> collapse;

  static LindbladModel closed(ComplexMatrix<Real> h) { return make(std::move(h), {}); }

  static LindbladModel make(ComplexMatrix<Real> h, std::vector<CollapseTerm<Real>> terms) {
    LindbladModel m{std::move(h), std::move(terms)};
    if (m.hamiltonian.rows() != m.hamiltonian.cols()) throw std::invalid_argument("H must be square");
    if ((m.hamiltonian - m.hamiltonian.adjoint()).cwiseAbs().maxCoeff() > Real(1e-12))
      throw std::invalid_argument("H must be Hermitian");
    for (const auto& t : m.collapse) {
      if (t.rate < Real(0)) throw std::invalid_argument("collapse rates must be >= 0");
      if (t.op.rows() != m.hamiltonian.rows() || t.op.cols() != m.hamiltonian.cols())
        throw std::invalid_argument("collapse operator dimension mismatch");
    }
    return m;
  }

  // General rate-matrix form: diagonalize gamma_{jk} over the given operator
  // basis. Negative eigenrates mean the map is not completely positive and
  // are rejected.
  static LindbladModel from_rate_matrix(ComplexMatrix<Real> h, const std::vector<ComplexMatrix<Real>>& basis,
                                        const ComplexMatrix<Real>& gamma, Real tol = Real(1e-10)) {
    const Index k = static_cast<Index>(basis.size());
    if (gamma.rows() != k || gamma.cols() != k) throw std::invalid_argument("rate matrix dimension mismatch");
    if ((gamma - gamma.adjoint()).cwiseAbs().maxCoeff() > Real(1e-10))
      throw std::invalid_argument("rate matrix must be Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(gamma);
    std::vector<CollapseTerm<Real>> terms;
    for (Index a = 0; a < k; ++a) {
      const Real nu = es.eigenvalues()[a];
      if (nu < -tol) throw std::invalid_argument("rate matrix has a negative eigenvalue (not CP)");
      if (nu <= tol) continue;
      ComplexMatrix<Real> l = ComplexMatrix<Real>::Zero(h.rows(), h.cols());
      for (Index j = 0; j < k; ++j) l += es.eigenvectors()(j, a) * basis[static_cast<std::size_t>(j)];
      terms.push_back({std::move(l), nu});
    }
    return make(std::move(h), std::move(terms));
  }

  Index dim() const { return hamiltonian.rows(); }

  // Crude generator scale used by the step guard.
  Real generator_norm() const {
    Real g = Real(2) * hamiltonian.cwiseAbs().maxCoeff() * Real(hamiltonian.rows());
    for (const auto& t : collapse) {
      const Real l = t.op.norm();
      g += Real(2) * t.rate * l * l;
    }
    return g;
  }
};

// Pauli helpers in the fixed basis |0> = ground.
template <typename Real = double>
ComplexMatrix<Real> sigma_x() {
  ComplexMatrix<Real> m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
template <typename Real = double>
ComplexMatrix<Real> sigma_y() {
  ComplexMatrix<Real> m(2, 2);
  m << Complex<Real>(0, 0), Complex<Real>(0, -1), Complex<Real>(0, 1), Complex<Real>(0, 0);
  return m;
}
template <typename Real = double>
ComplexMatrix<Real> sigma_z() {
  ComplexMatrix<Real> m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
template <typename Real = double>
ComplexMatrix<Real> sigma_minus() {  // |0><1|
  ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}
template <typename Real = double>
ComplexMatrix<Real> sigma_plus() {  // |1><0|
  ComplexMatrix<Real> m = ComplexMatrix<Real>::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}
template <typename Real = double>
ComplexMatrix<Real> dephasing_collapse() {
  return sigma_z<Real>() / std::sqrt(Real(2));
}

// ---------------------------------------------------------------------------
// Right-hand side and RK4 stepping

template <typename Real>
ComplexMatrix<Real> gkls_rhs(const ComplexMatrix<Real>& rho, const LindbladModel<Real>& model) {
  const Complex<Real> i(0, 1);
  ComplexMatrix<Real> out = (model.hamiltonian * rho - rho * model.hamiltonian) / i;
  for (const auto& t : model.collapse) {
    const ComplexMatrix<Real> ldl = t.op.adjoint() * t.op;
    out += t.rate * (t.op * rho * t.op.adjoint() - Real(0.5) * (ldl * rho + rho * ldl));
  }
  return out;
}

// One RK4 step with re-symmetrization. The guard keeps the explicit scheme in
// its accuracy regime.
template <typename Real>
DensityMatrix<Real> gkls_step(const DensityMatrix<Real>& rho, const LindbladModel<Real>& model, Real dt) {
  if (rho.dim() != model.dim()) throw std::invalid_argument("state/model dimension mismatch");
  const Real gnorm = model.generator_norm();
  if (gnorm > Real(0) && dt > Real(0.1) / gnorm)
    throw std::invalid_argument("gkls_step: dt exceeds the 0.1/||generator|| step guard");

  const ComplexMatrix<Real>& r = rho.matrix();
  const ComplexMatrix<Real> k1 = gkls_rhs<Real>(r, model);
  const ComplexMatrix<Real> k2 = gkls_rhs<Real>(ComplexMatrix<Real>(r + (dt / 2) * k1), model);
  const ComplexMatrix<Real> k3 = gkls_rhs<Real>(ComplexMatrix<Real>(r + (dt / 2) * k2), model);
  const ComplexMatrix<Real> k4 = gkls_rhs<Real>(ComplexMatrix<Real>(r + dt * k3), model);

  auto out = DensityMatrix<Real>::from_matrix(r + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4));
  out.resymmetrize();
  if (out.min_eigenvalue() < Real(-1e-6)) throw std::runtime_error("gkls_step: positivity violated beyond -1e-6");
  return out;
}

// Integrate for total time T with automatic substepping under the guard.
template <typename Real>
DensityMatrix<Real> gkls_evolve(DensityMatrix<Real> rho, const LindbladModel<Real>& model, Real total_time,
                                Real max_dt = Real(1e-2)) {
  if (total_time < Real(0)) throw std::invalid_argument("negative evolution time");
  const Real gnorm = model.generator_norm();
  Real dt = max_dt;
  if (gnorm > Real(0)) dt = std::min(dt, Real(0.05) / gnorm);
  const Index steps = std::max<Index>(1, static_cast<Index>(std::ceil(total_time / dt)));
  const Real h = total_time / Real(steps);
  for (Index s = 0; s < steps; ++s) rho = gkls_step(rho, model, h);
  return rho;
}

// Superoperator matrix on column-stacked rho; the exact-exponential
// cross-check uses this at small dimension.
template <typename Real>
ComplexMatrix<Real> gkls_superoperator(const LindbladModel<Real>& model) {
  const Index d = model.dim();
  const Complex<Real> i(0, 1);
  auto kron = [](const ComplexMatrix<Real>& a, const ComplexMatrix<Real>& b) {
    ComplexMatrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index r = 0; r < a.rows(); ++r)
      for (Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
  };
  const ComplexMatrix<Real> id = ComplexMatrix<Real>::Identity(d, d);
  ComplexMatrix<Real> sup =
      (kron(id, model.hamiltonian) - kron(model.hamiltonian.transpose(), id)) / i;
  for (const auto& t : model.collapse) {
    const ComplexMatrix<Real> ldl = t.op.adjoint() * t.op;
    sup += t.rate * (kron(t.op.conjugate(), t.op) -
                     Real(0.5) * (kron(id, ldl) + kron(ldl.transpose(), id)));
  }
  return sup;
}

// ---------------------------------------------------------------------------
// Channels

template <typename Real = double>
struct QuantumChannel {
  std::vector<ComplexMatrix<Real>> kraus;

  Real completeness_defect() const {
    if (kraus.empty()) return Real(1);
    const Index d = kraus.front().rows();
    ComplexMatrix<Real> sum = ComplexMatrix<Real>::Zero(d, d);
    for (const auto& k : kraus) sum += k.adjoint() * k;
    return (sum - ComplexMatrix<Real>::Identity(d, d)).cwiseAbs().maxCoeff();
  }
};

template <typename Real>
DensityMatrix<Real> apply_channel(const DensityMatrix<Real>& rho, const QuantumChannel<Real>& ch) {
  if (ch.kraus.empty() || ch.kraus.front().rows() != rho.dim())
    throw std::invalid_argument("channel/state dimension mismatch");
  if (ch.completeness_defect() > Real(1e-8)) throw std::invalid_argument("Kraus set is not trace preserving");
  ComplexMatrix<Real> out = ComplexMatrix<Real>::Zero(rho.dim(), rho.dim());
  for (const auto& k : ch.kraus) out += k * rho.matrix() * k.adjoint();
  return DensityMatrix<Real>::from_matrix(std::move(out));
}

// rho -> (1-p) rho + p I/D via the Heisenberg-Weyl set.
template <typename Real = double>
QuantumChannel<Real> depolarizing_channel(Index dim, Real p) {
  if (p < Real(0) || p > Real(1)) throw std::invalid_argument("depolarizing strength must lie in [0,1]");
  QuantumChannel<Real> ch;
  const Real w = std::sqrt(p) / Real(dim);
  for (Index a = 0; a < dim; ++a) {
    for (Index b = 0; b < dim; ++b) {
      ComplexMatrix<Real> k = ComplexMatrix<Real>::Zero(dim, dim);
      for (Index x = 0; x < dim; ++x)
        k((x + a) % dim, x) = std::polar(Real(1), Real(2) * pi_v<Real> * Real(b) * Real(x) / Real(dim));
      if (a == 0 && b == 0)
        ch.kraus.push_back(std::sqrt(Real(1) - p + p / Real(dim * dim)) * ComplexMatrix<Real>::Identity(dim, dim));
      else
        ch.kraus.push_back(w * k);
    }
  }
  return ch;
}

// Single-qubit phase damping with off-diagonal survival lambda = e^{-nu t}.
template <typename Real = double>
QuantumChannel<Real> dephasing_channel(Real lambda) {
  if (lambda < Real(0) || lambda > Real(1)) throw std::invalid_argument("lambda must lie in [0,1]");
  QuantumChannel<Real> ch;
  ch.kraus.push_back(std::sqrt((Real(1) + lambda) / 2) * ComplexMatrix<Real>::Identity(2, 2));
  ch.kraus.push_back(std::sqrt((Real(1) - lambda) / 2) * sigma_z<Real>());
  return ch;
}

// Projects onto the computational basis: rho -> Diag(rho).
template <typename Real = double>
QuantumChannel<Real> full_dephasing_channel(Index dim) {
  QuantumChannel<Real> ch;
  for (Index j = 0; j < dim; ++j) {
    ComplexMatrix<Real> p = ComplexMatrix<Real>::Zero(dim, dim);
    p(j, j) = 1;
    ch.kraus.push_back(std::move(p));
  }
  return ch;
}

// ---------------------------------------------------------------------------
// Gate-based noise model

template <typename Real = double>
struct GateNoiseProfile {
  Real relax_rate = 0;             // idle 1/T1 per qubit
  Real dephase_rate = 0;           // idle 1/T2-style rate per qubit
  Real gate_relax_multiplier = 1;  // enhancement while a qubit is being gated
  Real gate_dephase_multiplier = 1;
  Real gate_duration = 1;

  void validate() const {
    if (relax_rate < 0 || dephase_rate < 0 || gate_relax_multiplier < 0 || gate_dephase_multiplier < 0 ||
        gate_duration <= 0)
      throw std::invalid_argument("noise profile entries must be non-negative (duration positive)");
  }
};

namespace detail {

// Embed a single-qubit operator at position q of an n-qubit register.
template <typename Real>
ComplexMatrix<Real> embed_1q(const ComplexMatrix<Real>& op, int q, int n) {
  ComplexMatrix<Real> out = ComplexMatrix<Real>::Identity(1, 1);
  for (int k = 0; k < n; ++k) {
    const ComplexMatrix<Real>& f = (k == q) ? op : ComplexMatrix<Real>::Identity(2, 2).eval();
    ComplexMatrix<Real> next(out.rows() * f.rows(), out.cols() * f.cols());
    for (Index r = 0; r < out.rows(); ++r)
      for (Index c = 0; c < out.cols(); ++c) next.block(r * f.rows(), c * f.cols(), f.rows(), f.cols()) = out(r, c) * f;
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

template <typename Real = double>
struct NoisyRunResult {
  std::vector<DensityMatrix<Real>> trajectory;  // after each gate
  RealVector<Real> fidelity_vs_ideal;           // against the noiseless pure run
};

// Interleaves exact gate unitaries with GKLS decoherence segments. During a
// gate of duration tau_g, the gated qubits carry enhanced rates and idle
// qubits carry idle rates.
template <typename Real>
NoisyRunResult<Real> noisy_circuit_run(const DensityMatrix<Real>& rho0, const Circuit<Real>& circuit,
                                       const GateNoiseProfile<Real>& profile) {
  profile.validate();
  const int n = circuit.n_qubits;
  const Index dim = Index(1) << n;
  if (rho0.dim() != dim) throw std::invalid_argument("state/circuit dimension mismatch");

  NoisyRunResult<Real> out;
  out.trajectory.reserve(circuit.gates.size());
  out.fidelity_vs_ideal.resize(static_cast<Index>(circuit.gates.size()));

  DensityMatrix<Real> rho = rho0;
  // Ideal pure reference: rho0 must be pure for the fidelity track.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(rho0.matrix());
  Index which;
  es.eigenvalues().maxCoeff(&which);
  auto ideal = StateVector<Real>::from_amplitudes(es.eigenvectors().col(which));

  Index step = 0;
  for (const auto& g : circuit.gates) {
    // Decoherence segment for this gate's duration.
    std::vector<CollapseTerm<Real>> terms;
    for (int q = 0; q < n; ++q) {
      const bool active = (q == g.target) || (g.is_two_qubit() && q == g.control);
      const Real rr = profile.relax_rate * (active ? profile.gate_relax_multiplier : Real(1));
      const Real rd = profile.dephase_rate * (active ? profile.gate_dephase_multiplier : Real(1));
      if (rr > 0) terms.push_back({detail::embed_1q(sigma_minus<Real>(), q, n), rr});
      if (rd > 0) terms.push_back({detail::embed_1q(dephasing_collapse<Real>(), q, n), rd});
    }
    auto model = LindbladModel<Real>::make(ComplexMatrix<Real>::Zero(dim, dim), std::move(terms));
    rho = gkls_evolve(rho, model, profile.gate_duration);

    // Exact gate on both the noisy and the ideal track.
    Circuit<Real> single;
    single.n_qubits = n;
    single.push(g);
    const ComplexMatrix<Real> u = circuit_matrix(single);
    rho = DensityMatrix<Real>::from_matrix(u * rho.matrix() * u.adjoint());

    apply_gate_inplace(ideal, g);
    out.fidelity_vs_ideal[step++] = fidelity(ideal, rho);
    out.trajectory.push_back(rho);
  }
  return out;
}

}  // namespace qfes
