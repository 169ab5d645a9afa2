// circuits.hpp
// Quantum subroutines built on the gate set: QFT, phase estimation, the
// Grover walk with amplitude amplification, amplitude estimation, and
// observable estimation through an ancilla rotation.
//
// Phase convention (test-pinned): eigenphases are defined by
// U|psi> = exp(+i*alpha)|psi>, alpha in [0, 2*pi). The ancilla register is
// prepared with Hadamards, controlled powers CU^(2^k) imprint exp(i*a*alpha),
// and the inverse QFT reads alpha out.

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qfes/fft.hpp"
#include "qfes/qstate.hpp"
#include "qfes/types.hpp"

namespace qfes {

// ---------------------------------------------------------------------------
// QFT

// n Hadamards, n(n-1)/2 controlled rotations R(2*pi/2^k), and (optionally)
// floor(n/2) final swaps. Without the swap stage the output register is
// bit-reversed; callers that elide it must re-index.
template <typename Real = double>
Circuit<Real> qft_circuit(int n, bool with_swaps = true) {
  if (n < 1) throw std::invalid_argument("qft needs n >= 1");
  Circuit<Real> c;
  c.n_qubits = n;
  for (int k = 0; k < n; ++k) {
    c.push(Gate<Real>::h(k));
    for (int l = k + 1; l < n; ++l)
      c.push(Gate<Real>::cr(l, k, Real(2) * pi_v<Real> / Real(Index(1) << (l - k + 1))));
  }
  if (with_swaps)
    for (int k = 0; k < n / 2; ++k) c.push(Gate<Real>::swap(k, n - 1 - k));
  return c;
}

template <typename Real>
StateVector<Real> qft(const StateVector<Real>& state) {
  return run_circuit(state, qft_circuit<Real>(state.n_qubits()));
}

template <typename Real>
StateVector<Real> inverse_qft(const StateVector<Real>& state) {
  return run_circuit(state, inverse_circuit(qft_circuit<Real>(state.n_qubits())));
}

// ---------------------------------------------------------------------------
// Oracles and the Grover walk

// Diagonal function oracle O_f|x> = (-1)^{f(x)}|x>. Realized explicitly at
// desk scale; O_f^2 = I by construction.
template <typename Real = double>
struct PhaseOracle {
  RealVector<Real> sign;  // entries +-1

  static PhaseOracle from_marked(Index dim, const std::vector<Index>& marked) {
    PhaseOracle o;
    o.sign = RealVector<Real>::Ones(dim);
    for (Index x : marked) {
      if (x < 0 || x >= dim) throw std::out_of_range("marked state out of range");
      o.sign[x] = -1;
    }
    return o;
  }

  static PhaseOracle from_function(Index dim, const std::function<bool(Index)>& f) {
    PhaseOracle o;
    o.sign = RealVector<Real>::Ones(dim);
    for (Index x = 0; x < dim; ++x)
      if (f(x)) o.sign[x] = -1;
    return o;
  }

  Index marked_count() const {
    Index m = 0;
    for (Index x = 0; x < sign.size(); ++x)
      if (sign[x] < 0) ++m;
    return m;
  }
};

// G = O_|s> O_f with O_|s> = 2|s><s| - 1. Restricted to span{good, bad} this
// is a rotation by theta with sin(theta/2) equal to the good amplitude of s.
template <typename Real = double>
struct GroverWalk {
  StateVector<Real> s;  // A|0>
  PhaseOracle<Real> oracle;

  static GroverWalk walsh_hadamard(int n_qubits, const std::vector<Index>& marked) {
    GroverWalk w;
    w.s = StateVector<Real>::uniform_superposition(n_qubits);
    w.oracle = PhaseOracle<Real>::from_marked(w.s.dim(), marked);
    return w;
  }

  static GroverWalk from_state(StateVector<Real> s, PhaseOracle<Real> oracle) {
    if (s.dim() != oracle.sign.size()) throw std::invalid_argument("oracle/state dimension mismatch");
    return GroverWalk{std::move(s), std::move(oracle)};
  }

  // Exact rotation angle of G in the good/bad plane.
  Real theta() const {
    Real good = 0;
    for (Index x = 0; x < s.dim(); ++x)
      if (oracle.sign[x] < 0) good += std::norm(s.amps()[x]);
    return Real(2) * std::asin(std::min(Real(1), std::sqrt(good)));
  }

  void apply(ComplexVector<Real>& psi) const {
    psi.array() *= oracle.sign.template cast<Complex<Real>>().array();
    const Complex<Real> ov = s.amps().dot(psi);
    psi = (Real(2) * ov) * s.amps() - psi;
  }
};

template <typename Real>
StateVector<Real> grover_iterate(const GroverWalk<Real>& walk, const StateVector<Real>& state, Index k) {
  if (k < 0) throw std::invalid_argument("iteration count must be >= 0");
  ComplexVector<Real> psi = state.amps();
  for (Index i = 0; i < k; ++i) walk.apply(psi);
  return StateVector<Real>::from_amplitudes(std::move(psi));
}

template <typename Real>
Real good_probability(const GroverWalk<Real>& walk, const StateVector<Real>& state) {
  Real p = 0;
  for (Index x = 0; x < state.dim(); ++x)
    if (walk.oracle.sign[x] < 0) p += std::norm(state.amps()[x]);
  return p;
}

// k = round(pi/(2 theta) - 1/2), the iteration count that lands closest to
// the good axis.
template <typename Real>
Index optimal_grover_iterations(const GroverWalk<Real>& walk) {
  const Real th = walk.theta();
  if (th <= Real(0)) return 0;
  return static_cast<Index>(std::llround(pi_v<Real> / (2 * th) - Real(0.5)));
}

// ---------------------------------------------------------------------------
// Phase estimation

template <typename Real = double>
struct QpeResult {
  RealVector<Real> ancilla_probs;  // distribution over 2^m readouts
  Index mode = 0;
  Real alpha = 0;          // 2*pi*mode/2^m
  Real eigvec_residual = 0;  // ||U psi - <psi|U psi> psi||; flagged, not fatal
};

// Protocol on the joint (ancilla x target) register: Hadamard wall,
// controlled powers, inverse QFT on the ancilla, readout of the marginal.
// The rows of the joint state are accumulated as U^a psi directly, which is
// the circuit's action written index-wise.
template <typename Real>
QpeResult<Real> phase_estimation(const std::function<void(ComplexVector<Real>&)>& apply_u,
                                 const StateVector<Real>& eigvec, int m_bits) {
  if (m_bits < 1) throw std::invalid_argument("m_bits must be >= 1");
  const Index M = Index(1) << m_bits;
  const Index D = eigvec.dim();

  ComplexMatrix<Real> joint(M, D);
  ComplexVector<Real> row = eigvec.amps();
  const Real scale = Real(1) / std::sqrt(Real(M));
  joint.row(0) = row.transpose() * scale;
  for (Index a = 1; a < M; ++a) {
    apply_u(row);
    joint.row(a) = row.transpose() * scale;
  }

  // Residual of the eigenvector premise, measured on the first application.
  ComplexVector<Real> u_psi = eigvec.amps();
  apply_u(u_psi);
  const Complex<Real> lambda = eigvec.amps().dot(u_psi);
  const Real residual = (u_psi - lambda * eigvec.amps()).norm();

  ComplexVector<Real> col(M);
  for (Index d = 0; d < D; ++d) {
    col = joint.col(d);
    iqft_inplace(col);
    joint.col(d) = col;
  }

  QpeResult<Real> r;
  r.ancilla_probs = joint.rowwise().squaredNorm();
  r.ancilla_probs.maxCoeff(&r.mode);
  r.alpha = Real(2) * pi_v<Real> * Real(r.mode) / Real(M);
  r.eigvec_residual = residual;
  return r;
}

template <typename Real>
QpeResult<Real> phase_estimation(const ComplexMatrix<Real>& u, const StateVector<Real>& eigvec, int m_bits) {
  if (u.rows() != u.cols() || u.rows() != eigvec.dim()) throw std::invalid_argument("dimension mismatch");
  const Real defect = (u.adjoint() * u - ComplexMatrix<Real>::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (defect > Real(1e-8)) throw std::invalid_argument("phase estimation requires a unitary operator");
  return phase_estimation<Real>([&u](ComplexVector<Real>& v) { v = (u * v).eval(); }, eigvec, m_bits);
}

// ---------------------------------------------------------------------------
// Amplitude estimation

template <typename Real = double>
struct AmplitudeEstimate {
  Real estimate = 0;  // sin^2(theta_hat/2)
  Real theta = 0;
  QpeResult<Real> qpe;
  // Readouts y and 2^m - y decode to the same amplitude, so the estimate is
  // invariant under which of the two ancilla peaks wins.
};

template <typename Real>
AmplitudeEstimate<Real> amplitude_estimate(const GroverWalk<Real>& walk, int m_bits) {
  if (m_bits < 1) throw std::invalid_argument("m_bits must be >= 1");
  AmplitudeEstimate<Real> r;
  r.qpe = phase_estimation<Real>([&walk](ComplexVector<Real>& v) { walk.apply(v); }, walk.s, m_bits);
  r.theta = r.qpe.alpha;
  const Real half = r.theta / 2;
  r.estimate = std::sin(half) * std::sin(half);
  return r;
}

// ---------------------------------------------------------------------------
// Observable estimation

template <typename Real = double>
struct ObservableEstimate {
  Real value = 0;      // <O> after unscaling
  Real amplitude = 0;  // raw sin^2(theta/2) on the ancilla-|1> subspace
  Real scale = 0;      // N * O_max
  AmplitudeEstimate<Real> qae;
};

// Encodes phi(x) = sqrt(O(x)/O_max) psi(x) on an ancilla rotation and runs
// amplitude estimation on the ancilla-|1> subspace; sin^2(theta/2) = <O>/N
// for the rescaled observable. The joint index is 2x + ancilla bit.
template <typename Real>
ObservableEstimate<Real> estimate_observable(const StateVector<Real>& psi, const RealVector<Real>& observable,
                                             int m_bits, Real o_max = Real(-1)) {
  const Index N = psi.dim();
  if (observable.size() != N) throw std::invalid_argument("observable/state dimension mismatch");
  if (observable.minCoeff() < Real(0)) throw std::invalid_argument("observable must be non-negative");

  const Real omax = o_max > Real(0) ? o_max : observable.maxCoeff();
  ObservableEstimate<Real> r;
  r.scale = Real(N) * (omax > Real(0) ? omax : Real(1));
  if (omax <= Real(0)) return r;  // O identically zero

  ComplexVector<Real> joint = ComplexVector<Real>::Zero(2 * N);
  const Real root_n = std::sqrt(Real(N));
  for (Index x = 0; x < N; ++x) {
    const Complex<Real> phi = std::sqrt(observable[x] / omax) * psi.amps()[x];
    const Real mag2 = std::norm(phi);
    if (mag2 > Real(1) + Real(1e-12)) throw std::invalid_argument("rescaled amplitude exceeds 1");
    joint[2 * x] = std::sqrt(std::max(Real(0), Real(1) - mag2)) / root_n;
    joint[2 * x + 1] = phi / root_n;
  }

  auto walk = GroverWalk<Real>::from_state(
      StateVector<Real>::from_amplitudes(std::move(joint)),
      PhaseOracle<Real>::from_function(2 * N, [](Index j) { return (j & 1) != 0; }));
  r.qae = amplitude_estimate(walk, m_bits);
  r.amplitude = r.qae.estimate;
  r.value = r.amplitude * Real(N) * omax;
  return r;
}

}  // namespace qfes
