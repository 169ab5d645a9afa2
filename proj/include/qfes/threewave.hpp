// threewave.hpp
// Quantized decay-type three-wave interaction restricted to one conserved
// (s2, s3) subspace, plus the classical c-number equations for comparison.
// hbar = 1 throughout.
//
// Basis labels follow |s3 - j, s2 - s3 + j, j> for j = 0..D-1 with
// D = min(s2, s3) + 1; inputs with s2 < s3 are relabeled by swapping modes
// 2 and 3, which leaves the Hamiltonian invariant.

#pragma once

#include <stdexcept>
#include <vector>

#include "qfes/types.hpp"

namespace qfes {

struct ThreeWaveSubspace {
  long s2 = 0;
  long s3 = 0;
  Complex<double> g{1.0, 0.0};
  bool relabeled = false;  // true when the (s2, s3) input was swapped

  static ThreeWaveSubspace make(long s2_in, long s3_in, Complex<double> g) {
    if (s2_in < 0 || s3_in < 0) throw std::invalid_argument("s2 and s3 must be non-negative");
    ThreeWaveSubspace s;
    s.relabeled = s2_in < s3_in;
    s.s2 = s.relabeled ? s3_in : s2_in;
    s.s3 = s.relabeled ? s2_in : s3_in;
    s.g = g;
    return s;
  }

  Index dim() const { return static_cast<Index>(s3) + 1; }

  // Occupations of the basis state j.
  long n1(Index j) const { return s3 - j; }
  long n2(Index j) const { return s2 - s3 + j; }
  long n3(Index j) const { return j; }
};

// Off-diagonal magnitude H_{j-1/2} = sqrt(j (s3+1-j) (s2-s3+j)).
inline double hopping_element(const ThreeWaveSubspace& sub, Index j) {
  if (j < 1 || j > sub.dim()) return 0.0;  // compact support: H_{-1/2} = H_{D+1/2} = 0
  const double a = static_cast<double>(j);
  const double b = static_cast<double>(sub.s3 + 1 - j);
  const double c = static_cast<double>(sub.s2 - sub.s3 + j);
  return std::sqrt(a * b * c);
}

// Hermitian tridiagonal Hamiltonian with zero diagonal:
//   H(j, j+1) = i g H_{j+1/2},  H(j+1, j) = -i conj(g) H_{j+1/2}.
inline ComplexMatrix<double> build_subspace_hamiltonian(const ThreeWaveSubspace& sub) {
  const Index d = sub.dim();
  ComplexMatrix<double> h = ComplexMatrix<double>::Zero(d, d);
  const Complex<double> i(0, 1);
  for (Index j = 0; j + 1 < d; ++j) {
    const double w = hopping_element(sub, j + 1);
    h(j, j + 1) = i * sub.g * w;
    h(j + 1, j) = -i * std::conj(sub.g) * w;
  }
  return h;
}

inline ComplexMatrix<double> build_subspace_hamiltonian(long s2, long s3, Complex<double> g) {
  return build_subspace_hamiltonian(ThreeWaveSubspace::make(s2, s3, g));
}

// Exact propagator U(dt) = exp(-i H dt) through the eigendecomposition of the
// Hermitian matrix; doubles as the oracle for any approximate scheme.
class ThreeWavePropagator {
 public:
  explicit ThreeWavePropagator(const ComplexMatrix<double>& h) : solver_(h) {
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("Hamiltonian must be Hermitian");
  }

  ComplexMatrix<double> unitary(double dt) const {
    const auto& v = solver_.eigenvectors();
    ComplexVector<double> phases(solver_.eigenvalues().size());
    for (Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, -solver_.eigenvalues()[k] * dt);
    return v * phases.asDiagonal() * v.adjoint();
  }

  ComplexVector<double> advance(const ComplexVector<double>& psi, double dt) const {
    const auto& v = solver_.eigenvectors();
    ComplexVector<double> coeff = v.adjoint() * psi;
    for (Index k = 0; k < coeff.size(); ++k) coeff[k] *= std::polar(1.0, -solver_.eigenvalues()[k] * dt);
    return v * coeff;
  }

 private:
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<double>> solver_;
};

// N_steps+1 states sampled at uniform dt, exact per step.
inline std::vector<ComplexVector<double>> propagate(const ComplexMatrix<double>& h, const ComplexVector<double>& psi0,
                                                    double dt, Index n_steps) {
  if (psi0.size() != h.rows()) throw std::invalid_argument("state/Hamiltonian dimension mismatch");
  ThreeWavePropagator prop(h);
  std::vector<ComplexVector<double>> traj;
  traj.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.push_back(psi0);
  for (Index s = 0; s < n_steps; ++s) traj.push_back(prop.advance(traj.back(), dt));
  return traj;
}

struct OccupationSeries {
  RealVector<double> n1, n2, n3, n1_sq;
};

inline OccupationSeries occupation_expectations(const std::vector<ComplexVector<double>>& traj,
                                                const ThreeWaveSubspace& sub) {
  const Index steps = static_cast<Index>(traj.size());
  OccupationSeries out;
  out.n1.resize(steps);
  out.n2.resize(steps);
  out.n3.resize(steps);
  out.n1_sq.resize(steps);
  for (Index t = 0; t < steps; ++t) {
    const auto& psi = traj[static_cast<std::size_t>(t)];
    if (psi.size() != sub.dim()) throw std::invalid_argument("trajectory dimension mismatch");
    double e1 = 0, e2 = 0, e3 = 0, e1sq = 0;
    for (Index j = 0; j < psi.size(); ++j) {
      const double p = std::norm(psi[j]);
      e1 += p * static_cast<double>(sub.n1(j));
      e2 += p * static_cast<double>(sub.n2(j));
      e3 += p * static_cast<double>(sub.n3(j));
      e1sq += p * static_cast<double>(sub.n1(j)) * static_cast<double>(sub.n1(j));
    }
    out.n1[t] = e1;
    out.n2[t] = e2;
    out.n3[t] = e3;
    out.n1_sq[t] = e1sq;
  }
  return out;
}

struct MomentResidual {
  double max_residual = 0;   // |d2<n1>/dt2 - RHS| at interior points
  double max_antisym = 0;    // |d2<n1>/dt2 + d2<n2>/dt2| and the n3 analogue
};

// Central second difference of <n1> against
//   2|g|^2 [ s2 s3 - (2 s2 + 2 s3 + 1) <n1> + 3 <n1^2> ],
// plus the sign relations d2<n1> = -d2<n2> = -d2<n3>.
inline MomentResidual verify_moment_equation(const std::vector<ComplexVector<double>>& traj,
                                             const ThreeWaveSubspace& sub, double dt) {
  if (traj.size() < 5) throw std::invalid_argument("trajectory too short for differencing");
  const auto occ = occupation_expectations(traj, sub);
  const double g2 = std::norm(sub.g);
  const double s2 = static_cast<double>(sub.s2), s3 = static_cast<double>(sub.s3);
  MomentResidual r;
  for (Index t = 1; t + 1 < occ.n1.size(); ++t) {
    const double dd1 = (occ.n1[t + 1] - 2 * occ.n1[t] + occ.n1[t - 1]) / (dt * dt);
    const double dd2 = (occ.n2[t + 1] - 2 * occ.n2[t] + occ.n2[t - 1]) / (dt * dt);
    const double dd3 = (occ.n3[t + 1] - 2 * occ.n3[t] + occ.n3[t - 1]) / (dt * dt);
    const double rhs = 2 * g2 * (s2 * s3 - (2 * s2 + 2 * s3 + 1) * occ.n1[t] + 3 * occ.n1_sq[t]);
    r.max_residual = std::max(r.max_residual, std::abs(dd1 - rhs));
    r.max_antisym = std::max({r.max_antisym, std::abs(dd1 + dd2), std::abs(dd1 + dd3)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Classical three-wave equations (c-number reduction)
//   da1/dt = g a2 a3,  da2/dt = -conj(g) a1 conj(a3),  da3/dt = -conj(g) a1 conj(a2)

struct ClassicalThreeWaveState {
  Complex<double> a1, a2, a3;

  double s2() const { return std::norm(a1) + std::norm(a2); }
  double s3() const { return std::norm(a1) + std::norm(a3); }
};

inline ClassicalThreeWaveState classical_rhs(const ClassicalThreeWaveState& s, Complex<double> g) {
  return {g * s.a2 * s.a3, -std::conj(g) * s.a1 * std::conj(s.a3), -std::conj(g) * s.a1 * std::conj(s.a2)};
}

inline std::vector<ClassicalThreeWaveState> classical_threewave(const ClassicalThreeWaveState& a0, Complex<double> g,
                                                                double dt, Index n_steps) {
  const double amp = std::sqrt(std::max(a0.s2(), a0.s3()));
  if (std::abs(g) * amp * dt > 0.1) throw std::invalid_argument("classical_threewave: step too large for RK4");

  auto add = [](const ClassicalThreeWaveState& x, const ClassicalThreeWaveState& y, double w) {
    return ClassicalThreeWaveState{x.a1 + w * y.a1, x.a2 + w * y.a2, x.a3 + w * y.a3};
  };

  std::vector<ClassicalThreeWaveState> traj;
  traj.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.push_back(a0);
  ClassicalThreeWaveState s = a0;
  for (Index n = 0; n < n_steps; ++n) {
    const auto k1 = classical_rhs(s, g);
    const auto k2 = classical_rhs(add(s, k1, dt / 2), g);
    const auto k3 = classical_rhs(add(s, k2, dt / 2), g);
    const auto k4 = classical_rhs(add(s, k3, dt), g);
    s.a1 += dt / 6.0 * (k1.a1 + 2.0 * k2.a1 + 2.0 * k3.a1 + k4.a1);
    s.a2 += dt / 6.0 * (k1.a2 + 2.0 * k2.a2 + 2.0 * k3.a2 + k4.a2);
    s.a3 += dt / 6.0 * (k1.a3 + 2.0 * k2.a3 + 2.0 * k3.a3 + k4.a3);
    traj.push_back(s);
  }
  return traj;
}

// Subspace-projected product coherent state: c_j proportional to
// a1^(s3-j) a2^(s2-s3+j) a3^j / sqrt((s3-j)! (s2-s3+j)! j!), normalized.
inline ComplexVector<double> projected_coherent_state(const ThreeWaveSubspace& sub, Complex<double> a1,
                                                      Complex<double> a2, Complex<double> a3) {
  auto ipow = [](Complex<double> base, long e) {
    Complex<double> out(1, 0);
    for (long k = 0; k < e; ++k) out *= base;
    return out;
  };
  const Index d = sub.dim();
  ComplexVector<double> c(d);
  for (Index j = 0; j < d; ++j) {
    const double lw = -0.5 * (std::lgamma(static_cast<double>(sub.n1(j)) + 1) +
                              std::lgamma(static_cast<double>(sub.n2(j)) + 1) +
                              std::lgamma(static_cast<double>(sub.n3(j)) + 1));
    c[j] = ipow(a1, sub.n1(j)) * ipow(a2, sub.n2(j)) * ipow(a3, sub.n3(j)) * std::exp(lw);
  }
  const double nrm = c.norm();
  if (!(nrm > 0)) throw std::invalid_argument("projected coherent state has zero weight in this subspace");
  return c / nrm;
}

}  // namespace qfes
