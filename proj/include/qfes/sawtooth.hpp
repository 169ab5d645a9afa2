// sawtooth.hpp
// Classical and quantum sawtooth map. Kicked Hamiltonian with quadratic
// kinetic and (piecewise) quadratic potential energy; kick strength K,
// period tau, torus -pi <= q, p*tau < pi.
//
// Classical step (drift, then kick with the fresh position):
//   q' = q + p tau,  p' = p + K q' tau
// with tangent map [[1, tau], [K tau, 1 + K tau^2]].
//
// Quantum map on N = 2^n states with hbar = 2 pi / (N tau):
//   psi <- IDFT( exp(-i p^2 tau / 2 hbar) DFT( exp(+i K q^2 tau / 2 hbar) psi ) )
// on the position grid q_j = -pi + 2 pi j / N, momentum lattice p_m = hbar m,
// m in [-N/2, N/2). Exactly unitary by construction. The potential's
// discontinuity at q = +-pi belongs to the left endpoint (j = 0 sits at
// q = -pi), which touches a single grid point.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qfes/fft.hpp"
#include "qfes/lindblad.hpp"
#include "qfes/rng.hpp"
#include "qfes/types.hpp"

namespace qfes {

struct SawtoothParams {
  double kick = 0.5;  // K
  double tau = 1.0;
  Index dim = 256;  // N = 2^n

  static SawtoothParams make(double kick, int n_qubits, double tau = 1.0) {
    if (n_qubits < 2 || n_qubits > 20) throw std::invalid_argument("sawtooth register needs 2..20 qubits");
    if (tau <= 0) throw std::invalid_argument("tau must be positive");
    SawtoothParams p;
    p.kick = kick;
    p.tau = tau;
    p.dim = Index(1) << n_qubits;
    return p;
  }

  // hbar N tau = 2 pi exactly.
  double hbar() const { return 2.0 * kPi / (static_cast<double>(dim) * tau); }
  double position(Index j) const { return -kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(dim); }
  // Physical momentum index for FFT bin k (centered lattice).
  long momentum_number(Index k) const { return k < dim / 2 ? static_cast<long>(k) : static_cast<long>(k - dim); }
};

// ---------------------------------------------------------------------------
// Classical map

struct ClassicalEnsemble {
  RealVector<double> q;           // wrapped to [-pi, pi)
  RealVector<double> p;           // wrapped so that p*tau in [-pi, pi)
  RealVector<double> p_unwrapped; // winding-corrected momentum for diffusion tracking

  static ClassicalEnsemble line(Index count, double p0, std::uint64_t seed) {
    ClassicalEnsemble e;
    e.q.resize(count);
    e.p = RealVector<double>::Constant(count, p0);
    e.p_unwrapped = e.p;
    RandomStream rng(seed);
    for (Index i = 0; i < count; ++i) e.q[i] = rng.uniform(-kPi, kPi);
    return e;
  }

  Index size() const { return q.size(); }
};

namespace detail {
inline double wrap_interval(double x, double half_width) {
  x = std::fmod(x + half_width, 2.0 * half_width);
  if (x < 0) x += 2.0 * half_width;
  return x - half_width;
}
}  // namespace detail

// Advance the points in [begin, end); chunks are independent, so callers may
// split the range across threads.
inline void csm_step_range(ClassicalEnsemble& e, const SawtoothParams& prm, Index begin, Index end) {
  const double pmax = kPi / prm.tau;
  for (Index i = begin; i < end; ++i) {
    double q = e.q[i] + e.p[i] * prm.tau;  // drift
    q = detail::wrap_interval(q, kPi);
    const double dp = prm.kick * q * prm.tau;  // kick with the fresh position
    e.q[i] = q;
    e.p[i] = detail::wrap_interval(e.p[i] + dp, pmax);
    e.p_unwrapped[i] += dp;
  }
}

inline void csm_step(ClassicalEnsemble& e, const SawtoothParams& prm) { csm_step_range(e, prm, 0, e.size()); }

inline Eigen::Matrix2d csm_tangent(const SawtoothParams& prm) {
  Eigen::Matrix2d m;
  m << 1.0, prm.tau, prm.kick * prm.tau, 1.0 + prm.kick * prm.tau * prm.tau;
  return m;
}

// ln of the largest-magnitude eigenvalue of the tangent map; zero throughout
// the integrable/anomalous band -4 <= K tau^2 <= 0.
inline double lyapunov_exponent(const SawtoothParams& prm) {
  const double tr = 2.0 + prm.kick * prm.tau * prm.tau;
  if (std::abs(tr) <= 2.0) return 0.0;
  return std::log((std::abs(tr) + std::sqrt(tr * tr - 4.0)) / 2.0);
}

// Benettin-style numeric estimate: renormalized tangent-vector growth along
// a trajectory. The sawtooth tangent map is constant, so this converges to
// the analytic value; kept as the oracle hook.
inline double benettin_lyapunov(const SawtoothParams& prm, Index steps, std::uint64_t seed) {
  RandomStream rng(seed);
  Eigen::Vector2d state(rng.uniform(-kPi, kPi), rng.uniform(-kPi / prm.tau, kPi / prm.tau));
  Eigen::Vector2d v(1.0, 0.0);
  const Eigen::Matrix2d m = csm_tangent(prm);
  double sum = 0;
  for (Index s = 0; s < steps; ++s) {
    double q = detail::wrap_interval(state[0] + state[1] * prm.tau, kPi);
    state[0] = q;
    state[1] = detail::wrap_interval(state[1] + prm.kick * q * prm.tau, kPi / prm.tau);
    v = m * v;
    const double g = v.norm();
    sum += std::log(g);
    v /= g;
  }
  return sum / static_cast<double>(steps);
}

// ---------------------------------------------------------------------------
// Quantum map

inline ComplexVector<double> momentum_eigenstate(const SawtoothParams& prm, long m) {
  // Indices wrap modulo N: m and m + N label the same state.
  long k = m % static_cast<long>(prm.dim);
  if (k < 0) k += static_cast<long>(prm.dim);
  ComplexVector<double> psi(prm.dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(prm.dim));
  for (Index j = 0; j < prm.dim; ++j)
    psi[j] = std::polar(norm, static_cast<double>(k) * prm.position(j));
  return psi;
}

// Gaussian coherent state on the torus, width sqrt(hbar/2) in both
// directions, periodized over position images.
inline ComplexVector<double> coherent_state(const SawtoothParams& prm, double q0, double p0) {
  const double hbar = prm.hbar();
  ComplexVector<double> psi = ComplexVector<double>::Zero(prm.dim);
  for (Index j = 0; j < prm.dim; ++j) {
    const double q = prm.position(j);
    Complex<double> amp(0, 0);
    for (int w = -2; w <= 2; ++w) {
      const double dq = q + 2.0 * kPi * w - q0;
      amp += std::polar(std::exp(-dq * dq / (4.0 * (hbar / 2.0))), p0 * dq / hbar);
    }
    psi[j] = amp;
  }
  psi /= psi.norm();
  return psi;
}

class QuantumSawtoothMap {
 public:
  explicit QuantumSawtoothMap(const SawtoothParams& prm) : prm_(prm) {
    if (!is_power_of_two(prm.dim)) throw std::invalid_argument("quantum map needs N = 2^n");
    rebuild_phases(prm.kick);
  }

  const SawtoothParams& params() const { return prm_; }

  // One step with an optional kick-strength override (echo jitter).
  void step(ComplexVector<double>& psi, std::optional<double> kick_override = std::nullopt) {
    apply(psi, kick_override.value_or(prm_.kick), /*inverse=*/false);
  }

  // Exact inverse of step() with the same kick strength.
  void step_back(ComplexVector<double>& psi, std::optional<double> kick_override = std::nullopt) {
    apply(psi, kick_override.value_or(prm_.kick), /*inverse=*/true);
  }

 private:
  void rebuild_phases(double kick) {
    if (kick_phase_.size() == prm_.dim && kick == cached_kick_) return;
    kick_phase_.resize(prm_.dim);
    kinetic_phase_.resize(prm_.dim);
    const double hbar = prm_.hbar();
    for (Index j = 0; j < prm_.dim; ++j) {
      const double q = prm_.position(j);
      kick_phase_[j] = std::polar(1.0, kick * q * q * prm_.tau / (2.0 * hbar));
      const double p = hbar * static_cast<double>(prm_.momentum_number(j));
      kinetic_phase_[j] = std::polar(1.0, -p * p * prm_.tau / (2.0 * hbar));
    }
    cached_kick_ = kick;
  }

  void apply(ComplexVector<double>& psi, double kick, bool inverse) {
    if (psi.size() != prm_.dim) throw std::invalid_argument("state dimension mismatch");
    rebuild_phases(kick);
    if (!inverse) {
      psi.array() *= kick_phase_.array();
      iqft_inplace(psi);  // position -> momentum
      psi.array() *= kinetic_phase_.array();
      qft_inplace(psi);  // momentum -> position
    } else {
      iqft_inplace(psi);
      psi.array() *= kinetic_phase_.array().conjugate();
      qft_inplace(psi);
      psi.array() *= kick_phase_.array().conjugate();
    }
  }

  SawtoothParams prm_;
  double cached_kick_ = 0;
  ComplexVector<double> kick_phase_, kinetic_phase_;
};

inline ComplexVector<double> qsm_step(ComplexVector<double> psi, const SawtoothParams& prm) {
  QuantumSawtoothMap map(prm);
  map.step(psi);
  return psi;
}

// ---------------------------------------------------------------------------
// Husimi-Q

struct HusimiField {
  RealVector<double> q_centers, p_centers;
  RealMatrix<double> value;  // (Nq, Np), value >= 0

  double cell() const {
    return (q_centers[1] - q_centers[0]) * (p_centers[1] - p_centers[0]);
  }
  double quadrature_sum() const { return value.sum() * cell(); }
};

// Q(q, p) = |<alpha_{q,p} | psi>|^2 / (2 pi hbar) with discretely normalized
// torus coherent states; the quadrature sum approaches 1 on coarse grids.
inline HusimiField husimi_q(const ComplexVector<double>& psi, const SawtoothParams& prm, Index nq, Index np) {
  if (nq < 8 || np < 8) throw std::invalid_argument("husimi grid needs >= 8 cells per axis");
  const double hbar = prm.hbar();
  const double sigma = std::sqrt(hbar / 2.0);
  const double dq_grid = 2.0 * kPi / static_cast<double>(prm.dim);
  const Index window = std::min((prm.dim - 1) / 2, static_cast<Index>(std::ceil(7.0 * sigma / dq_grid)) + 1);

  HusimiField out;
  out.q_centers.resize(nq);
  out.p_centers.resize(np);
  out.value.resize(nq, np);
  for (Index a = 0; a < nq; ++a) out.q_centers[a] = -kPi + 2.0 * kPi * (a + 0.5) / static_cast<double>(nq);
  const double pmax = kPi / prm.tau;
  for (Index b = 0; b < np; ++b) out.p_centers[b] = -pmax + 2.0 * pmax * (b + 0.5) / static_cast<double>(np);

  std::vector<Index> idx;
  std::vector<double> disp;
  for (Index a = 0; a < nq; ++a) {
    const double q0 = out.q_centers[a];
    idx.clear();
    disp.clear();
    // Collect grid points within the Gaussian window of any periodic image.
    const Index j0 = static_cast<Index>(std::floor((q0 + kPi) / dq_grid));
    for (Index off = -window; off <= window; ++off) {
      Index j = (j0 + off) % prm.dim;
      if (j < 0) j += prm.dim;
      double dq = prm.position(j) - q0;
      dq = detail::wrap_interval(dq, kPi);
      idx.push_back(j);
      disp.push_back(dq);
    }
    for (Index b = 0; b < np; ++b) {
      const double p0 = out.p_centers[b];
      Complex<double> overlap(0, 0);
      double norm2 = 0;
      for (std::size_t t = 0; t < idx.size(); ++t) {
        const double env = std::exp(-disp[t] * disp[t] / (2.0 * hbar));
        const Complex<double> alpha = std::polar(env, p0 * disp[t] / hbar);
        overlap += std::conj(alpha) * psi[idx[t]];
        norm2 += env * env;
      }
      out.value(a, b) = std::norm(overlap) / norm2 / (2.0 * kPi * hbar);
    }
  }
  return out;
}

// Cell-integrated coarse graining of the Husimi field: Q is evaluated on a
// subsampled grid and block-averaged, so thin ridges (width sqrt(hbar/2),
// far below a coarse cell at large n) are integrated rather than
// point-sampled. This is the field to compare against a classical cell
// histogram.
inline RealMatrix<double> husimi_q_coarse(const ComplexVector<double>& psi, const SawtoothParams& prm, Index bins,
                                          Index subsample = 8) {
  auto fine = husimi_q(psi, prm, bins * subsample, bins * subsample);
  RealMatrix<double> coarse = RealMatrix<double>::Zero(bins, bins);
  for (Index a = 0; a < bins * subsample; ++a)
    for (Index b = 0; b < bins * subsample; ++b) coarse(a / subsample, b / subsample) += fine.value(a, b);
  return coarse / static_cast<double>(subsample * subsample);
}

// ---------------------------------------------------------------------------
// Loschmidt echo

struct DecayFit {
  enum class Kind { exponential, algebraic, perturbative };
  Kind preferred = Kind::perturbative;
  double rate = 0;      // exponential: F ~ exp(-rate * t)
  double exponent = 0;  // algebraic:  F ~ t^(-exponent)
  double r2_exponential = 0;
  double r2_algebraic = 0;
  Index points_used = 0;
};

struct EchoResult {
  RealVector<double> fidelity;  // F(0) = 1, then t = 1..T
  DecayFit fit;
};

namespace detail {

inline double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y, double& slope) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;
  const double ss_tot = syy - sy * sy / n;
  if (ss_tot <= 0) return 1.0;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - slope * x[i] - intercept;
    ss_res += r * r;
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace detail

// Fit classification: drop points below the ergodic floor 10/N, compare
// log F vs t against log F vs log t; near-unity series count as perturbative.
inline DecayFit classify_echo_decay(const RealVector<double>& fidelity, Index dim) {
  DecayFit fit;
  const double floor_level = 10.0 / static_cast<double>(dim);
  std::vector<double> t, logf, logt;
  for (Index s = 1; s < fidelity.size(); ++s) {
    if (fidelity[s] <= floor_level) break;
    t.push_back(static_cast<double>(s));
    logf.push_back(std::log(fidelity[s]));
    logt.push_back(std::log(static_cast<double>(s)));
  }
  fit.points_used = static_cast<Index>(t.size());
  if (t.size() < 5) return fit;

  double slope_exp = 0, slope_alg = 0;
  fit.r2_exponential = detail::linear_fit_r2(t, logf, slope_exp);
  fit.r2_algebraic = detail::linear_fit_r2(logt, logf, slope_alg);
  fit.rate = -slope_exp;
  fit.exponent = -slope_alg;

  const double total_drop = 1.0 - fidelity[fidelity.size() - 1];
  if (total_drop < 0.02)
    fit.preferred = DecayFit::Kind::perturbative;
  else
    fit.preferred =
        fit.r2_exponential >= fit.r2_algebraic ? DecayFit::Kind::exponential : DecayFit::Kind::algebraic;
  return fit;
}

// Unitary-perturbation echo: forward steps with kick jitter K + eps_t, then
// the same count of exact inverse steps with independently drawn jitter.
// Realized as two forward runs with independent streams whose overlap at
// step t equals the echo fidelity (the backward leg's jitter is indexed from
// the turnaround).
inline EchoResult loschmidt_echo(const ComplexVector<double>& psi0, const SawtoothParams& prm, double epsilon,
                                 Index t_steps, std::uint64_t seed) {
  if (t_steps < 1) throw std::invalid_argument("echo needs at least one step");
  QuantumSawtoothMap map(prm);
  RandomStream forward_noise(seed), backward_noise(seed ^ 0x5deece66dULL);

  EchoResult out;
  out.fidelity.resize(t_steps + 1);
  out.fidelity[0] = 1.0;
  ComplexVector<double> fwd = psi0, bwd = psi0;
  for (Index s = 1; s <= t_steps; ++s) {
    map.step(fwd, prm.kick + forward_noise.uniform(-epsilon, epsilon));
    map.step(bwd, prm.kick + backward_noise.uniform(-epsilon, epsilon));
    const Complex<double> ov = bwd.dot(fwd);
    out.fidelity[s] = std::min(1.0 + 1e-9, std::norm(ov));
  }
  out.fit = classify_echo_decay(out.fidelity, prm.dim);
  return out;
}

// Lindblad-mode echo: density-matrix evolution with per-qubit relaxation and
// dephasing segments between exact map steps, forward then backward.
inline EchoResult loschmidt_echo_lindblad(const ComplexVector<double>& psi0, const SawtoothParams& prm,
                                          const GateNoiseProfile<double>& profile, Index t_steps) {
  int n_qubits = 0;
  while ((Index(1) << n_qubits) < prm.dim) ++n_qubits;
  if (prm.dim > 64) throw std::invalid_argument("lindblad echo is limited to n <= 6 (dense superoperators)");
  profile.validate();

  std::vector<CollapseTerm<double>> terms;
  for (int q = 0; q < n_qubits; ++q) {
    if (profile.relax_rate > 0)
      terms.push_back({detail::embed_1q<double>(sigma_minus<double>(), q, n_qubits), profile.relax_rate});
    if (profile.dephase_rate > 0)
      terms.push_back({detail::embed_1q<double>(dephasing_collapse<double>(), q, n_qubits), profile.dephase_rate});
  }
  auto model = LindbladModel<double>::make(ComplexMatrix<double>::Zero(prm.dim, prm.dim), std::move(terms));

  QuantumSawtoothMap map(prm);
  auto unitary_step = [&](DensityMatrix<double>& rho, bool back) {
    ComplexMatrix<double> m = rho.matrix();
    for (Index c = 0; c < prm.dim; ++c) {
      ComplexVector<double> col = m.col(c);
      back ? map.step_back(col) : map.step(col);
      m.col(c) = col;
    }
    for (Index r = 0; r < prm.dim; ++r) {
      ComplexVector<double> row = m.row(r).conjugate();
      back ? map.step_back(row) : map.step(row);
      m.row(r) = row.conjugate();
    }
    rho = DensityMatrix<double>::from_matrix(std::move(m));
  };

  EchoResult out;
  out.fidelity.resize(t_steps + 1);
  out.fidelity[0] = 1.0;
  for (Index t = 1; t <= t_steps; ++t) {
    auto rho = DensityMatrix<double>::from_pure(StateVector<double>::from_amplitudes(psi0));
    for (Index s = 0; s < t; ++s) {
      rho = gkls_evolve(rho, model, profile.gate_duration);
      unitary_step(rho, false);
    }
    for (Index s = 0; s < t; ++s) {
      rho = gkls_evolve(rho, model, profile.gate_duration);
      unitary_step(rho, true);
    }
    out.fidelity[t] = (StateVector<double>::from_amplitudes(psi0).amps().adjoint() * rho.matrix() *
                       StateVector<double>::from_amplitudes(psi0).amps())(0)
                          .real();
  }
  out.fit = classify_echo_decay(out.fidelity, prm.dim);
  return out;
}

// ---------------------------------------------------------------------------
// Momentum diffusion

struct DiffusionEstimate {
  double coefficient = 0;  // slope/2 of <(p-p0)^2> vs t
  Index window_points = 0;
  bool saturated = false;
  RealVector<double> variance;  // the fitted series
};

inline DiffusionEstimate fit_diffusion(const RealVector<double>& variance, double saturation_level) {
  DiffusionEstimate out;
  out.variance = variance;
  std::vector<double> t, v;
  for (Index s = 0; s < variance.size(); ++s) {
    if (saturation_level > 0 && variance[s] > 0.5 * saturation_level) {
      out.saturated = true;
      break;
    }
    t.push_back(static_cast<double>(s));
    v.push_back(variance[s]);
  }
  out.window_points = static_cast<Index>(t.size());
  if (t.size() < 5) {
    out.saturated = true;  // reported, not fatal
    return out;
  }
  double slope = 0;
  detail::linear_fit_r2(t, v, slope);
  out.coefficient = slope / 2.0;
  return out;
}

inline DiffusionEstimate classical_momentum_diffusion(const SawtoothParams& prm, Index ensemble_size, Index t_steps,
                                                      double p0, std::uint64_t seed) {
  auto ens = ClassicalEnsemble::line(ensemble_size, p0, seed);
  RealVector<double> var(t_steps + 1);
  var[0] = 0;
  for (Index s = 1; s <= t_steps; ++s) {
    csm_step(ens, prm);
    double acc = 0;
    for (Index i = 0; i < ens.size(); ++i) {
      const double d = ens.p_unwrapped[i] - p0;
      acc += d * d;
    }
    var[s] = acc / static_cast<double>(ens.size());
  }
  return fit_diffusion(var, 0.0);  // unwrapped momentum does not saturate
}

inline DiffusionEstimate quantum_momentum_diffusion(const SawtoothParams& prm, long m0, Index t_steps) {
  QuantumSawtoothMap map(prm);
  ComplexVector<double> psi = momentum_eigenstate(prm, m0);
  const double hbar = prm.hbar();
  RealVector<double> var(t_steps + 1);
  var[0] = 0;
  for (Index s = 1; s <= t_steps; ++s) {
    map.step(psi);
    ComplexVector<double> phi = psi;
    iqft_inplace(phi);
    double acc = 0;
    const long n = static_cast<long>(prm.dim);
    for (Index k = 0; k < prm.dim; ++k) {
      long dm = prm.momentum_number(k) - m0;  // minimal image on the momentum torus
      dm = ((dm + n / 2) % n + n) % n - n / 2;
      acc += std::norm(phi[k]) * static_cast<double>(dm) * static_cast<double>(dm);
    }
    var[s] = acc * hbar * hbar;
  }
  const double pmax = kPi / prm.tau;
  return fit_diffusion(var, pmax * pmax / 3.0);  // uniform-torus variance
}

}  // namespace qfes
