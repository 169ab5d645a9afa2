// qstate.hpp
// Pure and mixed state carriers, the elementary gate set, circuit
// application, and measurement sampling.
//
// Index convention (test-pinned): the basis ket |q0 q1 ... q_{n-1}> maps to
// the integer whose MOST significant bit is q0. Gate indices are 0-based and
// count from that leftmost qubit.

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qfes/rng.hpp"
#include "qfes/types.hpp"

namespace qfes {

// ---------------------------------------------------------------------------
// StateVector

template <typename Real = double>
class StateVector {
 public:
  StateVector() = default;

  // |00...0> on n qubits.
  static StateVector zero_state(int n_qubits) { return basis_state(n_qubits, 0); }

  static StateVector basis_state(int n_qubits, std::uint64_t index) {
    if (n_qubits < 0 || n_qubits > 30) throw std::invalid_argument("n_qubits out of range");
    const Index dim = Index(1) << n_qubits;
    if (static_cast<Index>(index) >= dim) throw std::out_of_range("basis index out of range");
    StateVector s;
    s.n_qubits_ = n_qubits;
    s.amps_ = ComplexVector<Real>::Zero(dim);
    s.amps_[static_cast<Index>(index)] = Complex<Real>(1, 0);
    return s;
  }

  // Qudit/subspace carrier with an explicit dimension.
  static StateVector qudit_basis(Index dim, Index index) {
    if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
    if (index < 0 || index >= dim) throw std::out_of_range("basis index out of range");
    StateVector s;
    s.n_qubits_ = exact_log2(dim);
    s.amps_ = ComplexVector<Real>::Zero(dim);
    s.amps_[index] = Complex<Real>(1, 0);
    return s;
  }

  // Normalizes on construction; rejects the zero vector.
  static StateVector from_amplitudes(ComplexVector<Real> amps) {
    const Real nrm = amps.norm();
    if (!(nrm > Real(0))) throw std::invalid_argument("cannot normalize a zero state");
    StateVector s;
    s.n_qubits_ = exact_log2(amps.size());
    s.amps_ = std::move(amps);
    s.amps_ /= nrm;
    return s;
  }

  static StateVector uniform_superposition(int n_qubits) {
    StateVector s = zero_state(n_qubits);
    s.amps_.setConstant(Complex<Real>(Real(1) / std::sqrt(Real(s.dim())), 0));
    return s;
  }

  Index dim() const { return amps_.size(); }
  int n_qubits() const { return n_qubits_; }  // -1 when dim is not a power of two
  const ComplexVector<Real>& amps() const { return amps_; }
  ComplexVector<Real>& amps() { return amps_; }
  Complex<Real> operator[](Index i) const { return amps_[i]; }

  Real norm() const { return amps_.norm(); }
  Real probability(Index i) const { return std::norm(amps_[i]); }

 private:
  static int exact_log2(Index dim) {
    int n = 0;
    Index d = dim;
    while (d > 1 && (d & 1) == 0) {
      d >>= 1;
      ++n;
    }
    return d == 1 ? n : -1;
  }

  int n_qubits_ = 0;
  ComplexVector<Real> amps_;
};

template <typename Real>
Complex<Real> inner_product(const StateVector<Real>& a, const StateVector<Real>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
  return a.amps().dot(b.amps());  // Eigen's dot conjugates the left factor
}

// ---------------------------------------------------------------------------
// Gates

enum class GateKind { X, Y, Z, H, RX, RY, RZ, Phase, CNOT, CZ, SWAP, CU, CR };

template <typename Real = double>
struct Gate {
  GateKind kind;
  int target = 0;
  int control = -1;
  Real angle = 0;
  Eigen::Matrix<Complex<Real>, 2, 2> payload;  // CU only

  static Gate x(int q) { return {GateKind::X, q}; }
  static Gate y(int q) { return {GateKind::Y, q}; }
  static Gate z(int q) { return {GateKind::Z, q}; }
  static Gate h(int q) { return {GateKind::H, q}; }
  static Gate rx(int q, Real theta) { return {GateKind::RX, q, -1, theta}; }
  static Gate ry(int q, Real theta) { return {GateKind::RY, q, -1, theta}; }
  static Gate rz(int q, Real theta) { return {GateKind::RZ, q, -1, theta}; }
  static Gate phase(int q, Real phi) { return {GateKind::Phase, q, -1, phi}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, target, control}; }
  static Gate cz(int control, int target) { return {GateKind::CZ, target, control}; }
  static Gate swap(int a, int b) { return {GateKind::SWAP, b, a}; }
  static Gate cr(int control, int target, Real phi) { return {GateKind::CR, target, control, phi}; }
  static Gate cu(int control, int target, const Eigen::Matrix<Complex<Real>, 2, 2>& u) {
    Gate g{GateKind::CU, target, control};
    g.payload = u;
    return g;
  }

  bool is_two_qubit() const { return control >= 0; }
};

// 2x2 block applied on the target qubit (identity for kinds that are pure
// index permutations or phases handled separately).
template <typename Real>
Eigen::Matrix<Complex<Real>, 2, 2> single_qubit_matrix(const Gate<Real>& g) {
  using M2 = Eigen::Matrix<Complex<Real>, 2, 2>;
  const Complex<Real> i(0, 1);
  const Real c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
  M2 m;
  switch (g.kind) {
    case GateKind::X:
      m << 0, 1, 1, 0;
      return m;
    case GateKind::Y:
      m << 0, -i, i, 0;
      return m;
    case GateKind::Z:
      m << 1, 0, 0, -1;
      return m;
    case GateKind::H:
      m << 1, 1, 1, -1;
      return m / std::sqrt(Real(2));
    case GateKind::RX:
      m << Complex<Real>(c, 0), -i * s, -i * s, Complex<Real>(c, 0);
      return m;
    case GateKind::RY:
      m << c, -s, s, c;
      return m;
    case GateKind::RZ:
      m << std::exp(-i * Complex<Real>(g.angle / 2, 0)), Complex<Real>(0, 0), Complex<Real>(0, 0),
          std::exp(i * Complex<Real>(g.angle / 2, 0));
      return m;
    case GateKind::Phase:
    case GateKind::CR:
      m << 1, 0, 0, std::exp(i * Complex<Real>(g.angle, 0));
      return m;
    case GateKind::CU:
      return g.payload;
    default:
      throw std::logic_error("not a single-qubit block");
  }
}

// Dense matrix of the gate on its own 2- or 4-dimensional space (first index
// = control for two-qubit kinds). Used by unitarity checks and oracles.
template <typename Real>
ComplexMatrix<Real> gate_matrix(const Gate<Real>& g) {
  if (!g.is_two_qubit()) {
    ComplexMatrix<Real> m(2, 2);
    m = single_qubit_matrix(g);
    return m;
  }
  ComplexMatrix<Real> m = ComplexMatrix<Real>::Identity(4, 4);
  switch (g.kind) {
    case GateKind::CNOT:
      m(2, 2) = 0;
      m(3, 3) = 0;
      m(2, 3) = 1;
      m(3, 2) = 1;
      break;
    case GateKind::CZ:
      m(3, 3) = -1;
      break;
    case GateKind::SWAP:
      m(1, 1) = 0;
      m(2, 2) = 0;
      m(1, 2) = 1;
      m(2, 1) = 1;
      break;
    case GateKind::CR:
    case GateKind::CU: {
      const auto u = single_qubit_matrix(g);
      m.template block<2, 2>(2, 2) = u;
      break;
    }
    default:
      throw std::logic_error("not a two-qubit gate");
  }
  return m;
}

template <typename Real>
Gate<Real> inverse_gate(const Gate<Real>& g) {
  Gate<Real> inv = g;
  switch (g.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::Phase:
    case GateKind::CR:
      inv.angle = -g.angle;
      break;
    case GateKind::CU:
      inv.payload = g.payload.adjoint();
      break;
    default:
      break;  // involutions
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Circuit

template <typename Real = double>
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate<Real>> gates;  // applied left to right

  void push(const Gate<Real>& g) { gates.push_back(g); }
  Index size() const { return static_cast<Index>(gates.size()); }
};

template <typename Real>
Circuit<Real> inverse_circuit(const Circuit<Real>& c) {
  Circuit<Real> inv;
  inv.n_qubits = c.n_qubits;
  inv.gates.reserve(c.gates.size());
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) inv.gates.push_back(inverse_gate(*it));
  return inv;
}

// ---------------------------------------------------------------------------
// Gate application

namespace detail {

template <typename Real>
void check_gate_indices(const Gate<Real>& g, int n_qubits) {
  if (g.target < 0 || g.target >= n_qubits) throw std::out_of_range("gate target out of range");
  if (g.is_two_qubit()) {
    if (g.control < 0 || g.control >= n_qubits) throw std::out_of_range("gate control out of range");
    if (g.control == g.target) throw std::invalid_argument("control equals target");
  }
  if (g.kind == GateKind::CU) {
    const auto u = g.payload;
    const Real defect = (u.adjoint() * u - Eigen::Matrix<Complex<Real>, 2, 2>::Identity()).cwiseAbs().maxCoeff();
    if (defect > Real(1e-8)) throw std::invalid_argument("CU payload is not unitary");
  }
}

}  // namespace detail

// In-place application; requires exclusive access to the state.
template <typename Real>
void apply_gate_inplace(StateVector<Real>& state, const Gate<Real>& g) {
  const int n = state.n_qubits();
  if (n < 0) throw std::invalid_argument("gate application needs a qubit register");
  detail::check_gate_indices(g, n);
  auto& a = state.amps();
  const Index dim = a.size();
  const Index tbit = Index(1) << (n - 1 - g.target);

  if (!g.is_two_qubit()) {
    const auto u = single_qubit_matrix(g);
    for (Index i = 0; i < dim; ++i) {
      if (i & tbit) continue;
      const Index j = i | tbit;
      const Complex<Real> a0 = a[i], a1 = a[j];
      a[i] = u(0, 0) * a0 + u(0, 1) * a1;
      a[j] = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return;
  }

  const Index cbit = Index(1) << (n - 1 - g.control);
  switch (g.kind) {
    case GateKind::CNOT:
      for (Index i = 0; i < dim; ++i)
        if ((i & cbit) && !(i & tbit)) std::swap(a[i], a[i | tbit]);
      break;
    case GateKind::CZ:
      for (Index i = 0; i < dim; ++i)
        if ((i & cbit) && (i & tbit)) a[i] = -a[i];
      break;
    case GateKind::SWAP:
      for (Index i = 0; i < dim; ++i)
        if ((i & cbit) && !(i & tbit)) std::swap(a[i], a[(i & ~cbit) | tbit]);
      break;
    case GateKind::CR:
    case GateKind::CU: {
      const auto u = single_qubit_matrix(g);
      for (Index i = 0; i < dim; ++i) {
        if (!(i & cbit) || (i & tbit)) continue;
        const Index j = i | tbit;
        const Complex<Real> a0 = a[i], a1 = a[j];
        a[i] = u(0, 0) * a0 + u(0, 1) * a1;
        a[j] = u(1, 0) * a0 + u(1, 1) * a1;
      }
      break;
    }
    default:
      throw std::logic_error("unhandled two-qubit gate");
  }
}

template <typename Real>
StateVector<Real> apply_gate(StateVector<Real> state, const Gate<Real>& g) {
  apply_gate_inplace(state, g);
  return state;
}

template <typename Real>
void run_circuit_inplace(StateVector<Real>& state, const Circuit<Real>& c) {
  if (c.n_qubits != state.n_qubits()) throw std::invalid_argument("circuit/state dimension mismatch");
  for (const auto& g : c.gates) apply_gate_inplace(state, g);
}

template <typename Real>
StateVector<Real> run_circuit(StateVector<Real> state, const Circuit<Real>& c) {
  run_circuit_inplace(state, c);
  return state;
}

// Dense unitary of a whole circuit, built column by column. Oracle-scale only.
template <typename Real>
ComplexMatrix<Real> circuit_matrix(const Circuit<Real>& c) {
  const Index dim = Index(1) << c.n_qubits;
  ComplexMatrix<Real> u(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    auto col = run_circuit(StateVector<Real>::basis_state(c.n_qubits, j), c);
    u.col(j) = col.amps();
  }
  return u;
}

// ---------------------------------------------------------------------------
// Measurement

// i.i.d. samples from |amps|^2; deterministic under the seed.
template <typename Real>
std::map<std::uint64_t, std::uint64_t> measure_samples(const StateVector<Real>& state, std::uint64_t shots,
                                                       std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (std::abs(state.norm() - Real(1)) > Real(1e-6)) throw std::invalid_argument("state is not normalized");

  RealVector<Real> cdf(state.dim());
  Real acc = 0;
  for (Index i = 0; i < state.dim(); ++i) {
    acc += std::norm(state.amps()[i]);
    cdf[i] = acc;
  }
  cdf[state.dim() - 1] = std::max(acc, Real(1));

  RandomStream rng(seed);
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const Real r = static_cast<Real>(rng.uniform());
    Index lo = 0, hi = state.dim() - 1;
    while (lo < hi) {
      const Index mid = (lo + hi) / 2;
      if (cdf[mid] <= r)
        lo = mid + 1;
      else
        hi = mid;
    }
    ++counts[static_cast<std::uint64_t>(lo)];
  }
  return counts;
}

// Basis-state label such as "010" (qubit 0 leftmost).
inline std::string bitstring_label(std::uint64_t index, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if (index & (std::uint64_t(1) << (n_qubits - 1 - q))) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

// ---------------------------------------------------------------------------
// DensityMatrix

template <typename Real = double>
class DensityMatrix {
 public:
  DensityMatrix() = default;

  static DensityMatrix from_matrix(ComplexMatrix<Real> rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    DensityMatrix d;
    d.rho_ = std::move(rho);
    return d;
  }

  static DensityMatrix from_pure(const StateVector<Real>& psi) {
    DensityMatrix d;
    d.rho_ = psi.amps() * psi.amps().adjoint();
    return d;
  }

  static DensityMatrix maximally_mixed(Index dim) {
    DensityMatrix d;
    d.rho_ = ComplexMatrix<Real>::Identity(dim, dim) / Real(dim);
    return d;
  }

  Index dim() const { return rho_.rows(); }
  const ComplexMatrix<Real>& matrix() const { return rho_; }
  ComplexMatrix<Real>& matrix() { return rho_; }

  Real trace() const { return rho_.trace().real(); }
  Real purity() const { return (rho_ * rho_).trace().real(); }
  Real hermiticity_defect() const { return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff(); }

  Real min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(rho_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  void resymmetrize() { rho_ = ((rho_ + rho_.adjoint()) / Real(2)).eval(); }

 private:
  ComplexMatrix<Real> rho_;
};

// ---------------------------------------------------------------------------
// Fidelity and Bloch vector

template <typename Real>
Real fidelity(const StateVector<Real>& a, const StateVector<Real>& b) {
  return std::norm(inner_product(a, b));
}

template <typename Real>
Real fidelity(const StateVector<Real>& psi, const DensityMatrix<Real>& rho) {
  if (psi.dim() != rho.dim()) throw std::invalid_argument("dimension mismatch");
  return (psi.amps().adjoint() * rho.matrix() * psi.amps())(0).real();
}

template <typename Real>
Real fidelity(const DensityMatrix<Real>& rho, const StateVector<Real>& psi) {
  return fidelity(psi, rho);
}

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 via eigensolves.
template <typename Real>
Real fidelity(const DensityMatrix<Real>& rho, const DensityMatrix<Real>& sigma) {
  if (rho.dim() != sigma.dim()) throw std::invalid_argument("dimension mismatch");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es(rho.matrix());
  RealVector<Real> lam = es.eigenvalues().cwiseMax(Real(0)).cwiseSqrt();
  ComplexMatrix<Real> sqrt_rho =
      es.eigenvectors() * lam.template cast<Complex<Real>>().asDiagonal() * es.eigenvectors().adjoint();
  ComplexMatrix<Real> m = sqrt_rho * sigma.matrix() * sqrt_rho;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> es2((m + m.adjoint()) / Real(2));
  const Real tr = es2.eigenvalues().cwiseMax(Real(0)).cwiseSqrt().sum();
  return tr * tr;
}

// (nx, ny, nz) with rho = (I + n.sigma)/2; |0><0| sits at +z.
template <typename Real>
Eigen::Matrix<Real, 3, 1> bloch_vector(const DensityMatrix<Real>& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("bloch_vector requires a 2x2 density matrix");
  const auto& r = rho.matrix();
  Eigen::Matrix<Real, 3, 1> n;
  n[0] = (r(0, 1) + r(1, 0)).real();
  n[1] = (Complex<Real>(0, 1) * (r(0, 1) - r(1, 0))).real();
  n[2] = (r(0, 0) - r(1, 1)).real();
  return n;
}

}  // namespace qfes
