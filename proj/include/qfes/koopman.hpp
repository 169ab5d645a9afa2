// koopman.hpp
// Linear embeddings of nonlinear ODEs on periodic grids:
//   scalars   d(obs)/dt = -V.grad(obs)            (Koopman generator)
//   densities d(pdf)/dt = -div(V pdf)             (Perron-Frobenius generator)
//   half-forms d(psi)/dt = -(V.grad + div V)/2 psi - i L psi / hbar   (KvN / KvH)
// plus the integrable action-angle fast path, Carleman linearization on
// monomials, and the RK4 trajectory oracle everything is judged against.
//
// Discretization: central-difference D = -i d/dz on the periodic grid keeps
// H_KvN = (VD + DV)/2 exactly Hermitian; the first-order upwind variant of
// the density generator is kept alongside for contrast. The Eulerian picture
// is the default; Direction::backward flips the generator sign.

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "qfes/types.hpp"

namespace qfes {

using SparseReal = Eigen::SparseMatrix<double>;
using SparseComplex = Eigen::SparseMatrix<Complex<double>>;

enum class Direction { forward, backward };

// ---------------------------------------------------------------------------
// Grid

struct PeriodicGrid {
  int dim = 1;                      // 1 or 2
  std::array<Index, 2> n{0, 0};     // points per axis
  std::array<double, 2> lo{0, 0};
  std::array<double, 2> hi{0, 0};

  static PeriodicGrid line(Index n0, double lo0, double hi0) {
    PeriodicGrid g;
    g.dim = 1;
    g.n = {n0, 1};
    g.lo = {lo0, 0};
    g.hi = {hi0, 0};
    g.validate();
    return g;
  }

  static PeriodicGrid box(Index n0, Index n1, double lo0, double hi0, double lo1, double hi1) {
    PeriodicGrid g;
    g.dim = 2;
    g.n = {n0, n1};
    g.lo = {lo0, lo1};
    g.hi = {hi0, hi1};
    g.validate();
    return g;
  }

  void validate() const {
    for (int a = 0; a < dim; ++a) {
      if (n[static_cast<std::size_t>(a)] < 4) throw std::invalid_argument("grid axis needs >= 4 points");
      if (!(hi[static_cast<std::size_t>(a)] > lo[static_cast<std::size_t>(a)]))
        throw std::invalid_argument("grid bounds must be increasing");
    }
  }

  Index size() const { return dim == 1 ? n[0] : n[0] * n[1]; }
  double delta(int axis) const {
    return (hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]) /
           static_cast<double>(n[static_cast<std::size_t>(axis)]);
  }
  double coord(int axis, Index i) const {
    return lo[static_cast<std::size_t>(axis)] + delta(axis) * static_cast<double>(i);
  }
  Index flat(Index i0, Index i1 = 0) const { return dim == 1 ? i0 : i0 * n[1] + i1; }

  // Cell volume element.
  double measure() const { return dim == 1 ? delta(0) : delta(0) * delta(1); }

  RealVector<double> point(Index flat_index) const {
    RealVector<double> z(dim);
    if (dim == 1) {
      z[0] = coord(0, flat_index);
    } else {
      z[0] = coord(0, flat_index / n[1]);
      z[1] = coord(1, flat_index % n[1]);
    }
    return z;
  }
};

// ---------------------------------------------------------------------------
// Vector fields

struct VectorField {
  int dim = 1;
  std::function<RealVector<double>(double, const RealVector<double>&)> velocity;
  std::function<double(double, const RealVector<double>&)> divergence;
  std::vector<double> poly;  // c[m] = coefficient of z^m for 1-D polynomial fields

  static VectorField polynomial_1d(std::vector<double> coeffs) {
    VectorField f;
    f.dim = 1;
    f.poly = std::move(coeffs);
    f.velocity = [c = f.poly](double, const RealVector<double>& z) {
      double v = 0, zp = 1;
      for (double cm : c) {
        v += cm * zp;
        zp *= z[0];
      }
      RealVector<double> out(1);
      out[0] = v;
      return out;
    };
    f.divergence = [c = f.poly](double, const RealVector<double>& z) {
      double d = 0, zp = 1;
      for (std::size_t m = 1; m < c.size(); ++m) {
        d += static_cast<double>(m) * c[m] * zp;
        zp *= z[0];
      }
      return d;
    };
    return f;
  }

  // Rigid rotation in the (q, p) plane: V = (p, -q).
  static VectorField rotation_2d() {
    VectorField f;
    f.dim = 2;
    f.velocity = [](double, const RealVector<double>& z) {
      RealVector<double> v(2);
      v[0] = z[1];
      v[1] = -z[0];
      return v;
    };
    f.divergence = [](double, const RealVector<double>&) { return 0.0; };
    return f;
  }

  // Canonical flow of a Hamiltonian function: V = (dH/dp, -dH/dq),
  // divergence-free by construction.
  static VectorField hamiltonian_2d(std::function<RealVector<double>(const RealVector<double>&)> grad_h) {
    VectorField f;
    f.dim = 2;
    f.velocity = [g = std::move(grad_h)](double, const RealVector<double>& z) {
      const RealVector<double> dh = g(z);
      RealVector<double> v(2);
      v[0] = dh[1];
      v[1] = -dh[0];
      return v;
    };
    f.divergence = [](double, const RealVector<double>&) { return 0.0; };
    return f;
  }
};

// ---------------------------------------------------------------------------
// Discrete operators

namespace detail {

// Central difference d/dz along an axis, periodic wrap.
inline SparseReal central_derivative(const PeriodicGrid& grid, int axis) {
  const Index size = grid.size();
  const double inv2d = 1.0 / (2.0 * grid.delta(axis));
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(2 * size));
  const Index n0 = grid.n[0], n1 = grid.dim == 2 ? grid.n[1] : 1;
  for (Index i0 = 0; i0 < n0; ++i0) {
    for (Index i1 = 0; i1 < n1; ++i1) {
      const Index row = grid.flat(i0, i1);
      Index fwd, bwd;
      if (axis == 0) {
        fwd = grid.flat((i0 + 1) % n0, i1);
        bwd = grid.flat((i0 + n0 - 1) % n0, i1);
      } else {
        fwd = grid.flat(i0, (i1 + 1) % n1);
        bwd = grid.flat(i0, (i1 + n1 - 1) % n1);
      }
      trip.emplace_back(row, fwd, inv2d);
      trip.emplace_back(row, bwd, -inv2d);
    }
  }
  SparseReal m(size, size);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

inline RealVector<double> sample_velocity(const PeriodicGrid& grid, const VectorField& field, int axis, double t) {
  RealVector<double> v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = field.velocity(t, grid.point(i))[axis];
  return v;
}

}  // namespace detail

// Assembled generators over one grid/field pair. Matrices are built once and
// shared by the steppers below.
struct GridOperator {
  PeriodicGrid grid;
  SparseReal koopman;          // -sum_a V_a d_a              (scalars)
  SparseReal perron_frobenius; // -sum_a d_a V_a              (densities)
  SparseComplex kvn_h;         // (V D + D V)/2 [+ diag(L)/hbar], D = -i d/dz
  double vmax = 0;

  static GridOperator build(const PeriodicGrid& grid, const VectorField& field,
                            const std::optional<RealVector<double>>& phase_over_hbar = std::nullopt,
                            double t = 0.0) {
    if (field.dim != grid.dim) throw std::invalid_argument("field/grid dimension mismatch");
    GridOperator op;
    op.grid = grid;
    const Index size = grid.size();
    op.koopman = SparseReal(size, size);
    op.perron_frobenius = SparseReal(size, size);
    SparseComplex h(size, size);

    for (int a = 0; a < grid.dim; ++a) {
      const SparseReal d = detail::central_derivative(grid, a);
      const RealVector<double> v = detail::sample_velocity(grid, field, a, t);
      op.vmax = std::max(op.vmax, v.cwiseAbs().maxCoeff());
      const SparseReal vd = SparseReal(v.asDiagonal() * d);   // V d/dz
      const SparseReal dv = SparseReal(d * v.asDiagonal());   // d/dz V
      op.koopman -= vd;
      op.perron_frobenius -= dv;
      // (V D + D V)/2 with D = -i d/dz  ->  -i (vd + dv)/2.
      h += SparseComplex(SparseReal(vd + dv).cast<Complex<double>>() * Complex<double>(0, -0.5));
    }
    if (phase_over_hbar) {
      if (phase_over_hbar->size() != size) throw std::invalid_argument("phase table size mismatch");
      std::vector<Eigen::Triplet<Complex<double>>> trip;
      for (Index i = 0; i < size; ++i) trip.emplace_back(i, i, Complex<double>((*phase_over_hbar)[i], 0));
      SparseComplex diag(size, size);
      diag.setFromTriplets(trip.begin(), trip.end());
      h += diag;
    }
    op.kvn_h = h;
    return op;
  }

  double cfl(double dt) const {
    double worst = 0;
    for (int a = 0; a < grid.dim; ++a) worst = std::max(worst, vmax * dt / grid.delta(a));
    return worst;
  }
};

// First-order conservative upwind density generator (1-D), the dissipative
// alternative to the central scheme.
inline SparseReal upwind_pf_generator(const PeriodicGrid& grid, const VectorField& field, double t = 0.0) {
  if (grid.dim != 1) throw std::invalid_argument("upwind variant is 1-D");
  const Index n = grid.size();
  const double invd = 1.0 / grid.delta(0);
  RealVector<double> v_face(n);  // velocity at face j+1/2
  for (Index j = 0; j < n; ++j) {
    RealVector<double> z(1);
    z[0] = grid.coord(0, j) + 0.5 * grid.delta(0);
    v_face[j] = field.velocity(t, z)[0];
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (Index j = 0; j < n; ++j) {
    const Index jp = (j + 1) % n, jm = (j + n - 1) % n;
    // Flux F_{j+1/2} = v_face[j] * (v>0 ? f_j : f_{j+1}); A f = -(F_{j+1/2}-F_{j-1/2})/dz.
    if (v_face[j] > 0)
      trip.emplace_back(j, j, -v_face[j] * invd);
    else
      trip.emplace_back(j, jp, -v_face[j] * invd);
    if (v_face[jm] > 0)
      trip.emplace_back(j, jm, v_face[jm] * invd);
    else
      trip.emplace_back(j, j, v_face[jm] * invd);
  }
  SparseReal m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// ---------------------------------------------------------------------------
// Theta-scheme steppers

// Real theta step for densities / observables:
//   (I - theta dt A) x' = (I + (1-theta) dt A) x.
class ThetaStepper {
 public:
  ThetaStepper(SparseReal generator, double dt, double theta, double cfl_number)
      : a_(std::move(generator)), dt_(dt), theta_(theta) {
    if (theta < 0 || theta > 1) throw std::invalid_argument("theta must lie in [0,1]");
    if (theta < 0.5 && cfl_number > 1.0)
      throw std::invalid_argument("explicit-dominant theta step violates the CFL guard");
    const Index n = a_.rows();
    SparseReal identity(n, n);
    identity.setIdentity();
    rhs_ = identity + (1.0 - theta) * dt * a_;
    if (theta > 0) {
      SparseReal lhs = identity - theta * dt * a_;
      lu_.compute(lhs);
      if (lu_.info() != Eigen::Success) throw std::runtime_error("theta-step factorization failed");
    }
  }

  RealVector<double> step(const RealVector<double>& x) const {
    RealVector<double> y = rhs_ * x;
    return theta_ > 0 ? lu_.solve(y).eval() : y;
  }

 private:
  SparseReal a_, rhs_;
  double dt_, theta_;
  Eigen::SparseLU<SparseReal> lu_;
};

// Unitary theta step for half-forms: (I + i theta dt H) psi' = (I - i (1-theta) dt H) psi.
// At theta = 1/2 this is the Cayley transform of the Hermitian H and is
// exactly norm-preserving.
class KvnStepper {
 public:
  KvnStepper(const GridOperator& op, double dt, double theta = 0.5, Direction dir = Direction::forward)
      : dt_(dt), theta_(theta) {
    SparseComplex h = op.kvn_h;
    if (dir == Direction::backward) h = SparseComplex(-h);
    const Index n = h.rows();
    SparseComplex identity(n, n);
    identity.setIdentity();
    const Complex<double> i(0, 1);
    rhs_ = identity + h * (-i * (1.0 - theta) * dt);
    lhs_cached_ = identity + h * (i * theta * dt);
    lu_.compute(lhs_cached_);
    if (lu_.info() != Eigen::Success) throw std::runtime_error("kvn factorization failed");
    cfl_ = op.cfl(dt);
  }

  // Accuracy (not stability) indicator: V_max dt / dz.
  double cfl() const { return cfl_; }

  ComplexVector<double> step(const ComplexVector<double>& psi) const { return lu_.solve(rhs_ * psi); }

 private:
  double dt_, theta_;
  double cfl_ = 0;
  SparseComplex rhs_, lhs_cached_;
  Eigen::SparseLU<SparseComplex> lu_;
};

// One-shot wrappers matching the operation contracts; heavy loops should hold
// a stepper instead.
inline RealVector<double> liouville_step(const RealVector<double>& pdf, const PeriodicGrid& grid,
                                         const VectorField& field, double dt, double theta) {
  auto op = GridOperator::build(grid, field);
  return ThetaStepper(op.perron_frobenius, dt, theta, op.cfl(dt)).step(pdf);
}

inline RealVector<double> koopman_observable_step(const RealVector<double>& obs, const PeriodicGrid& grid,
                                                  const VectorField& field, double dt, double theta) {
  auto op = GridOperator::build(grid, field);
  return ThetaStepper(op.koopman, dt, theta, op.cfl(dt)).step(obs);
}

inline ComplexVector<double> kvn_step(const ComplexVector<double>& psi, const PeriodicGrid& grid,
                                      const VectorField& field, double dt, double theta = 0.5,
                                      const std::optional<RealVector<double>>& phase_over_hbar = std::nullopt,
                                      Direction dir = Direction::forward, double* cfl_out = nullptr) {
  auto op = GridOperator::build(grid, field, phase_over_hbar);
  KvnStepper st(op, dt, theta, dir);
  if (cfl_out) *cfl_out = st.cfl();
  return st.step(psi);
}

// Inverse participation ratio of |psi|^2: the scrambling diagnostic.
inline double participation_ratio(const ComplexVector<double>& psi) {
  double p2 = 0, p4 = 0;
  for (Index i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi[i]);
    p2 += p;
    p4 += p * p;
  }
  return p2 * p2 / p4;
}

// ---------------------------------------------------------------------------
// Prequantization helpers (KvH)

// L = H - p dH/dp on the grid, the classical-Lagrangian phase source.
inline RealVector<double> lagrangian_phase_table(const PeriodicGrid& grid,
                                                 const std::function<double(const RealVector<double>&)>& h,
                                                 const std::function<RealVector<double>(const RealVector<double>&)>& grad_h,
                                                 double hbar = 1.0) {
  if (grid.dim != 2) throw std::invalid_argument("KvH phase table expects a 2-D (q,p) grid");
  RealVector<double> l(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const RealVector<double> z = grid.point(i);
    l[i] = (h(z) - z[1] * grad_h(z)[1]) / hbar;
  }
  return l;
}

// Prequantum operator T_A = i hbar {A, .} + (A - p dA/dp) as a sparse matrix;
// {A, psi} is realized through the advection -V_A . grad with the canonical
// flow V_A. Satisfies [T_A, T_B] = i hbar T_{A,B} up to discretization error.
inline SparseComplex prequantum_operator(const PeriodicGrid& grid,
                                         const std::function<double(const RealVector<double>&)>& a,
                                         const std::function<RealVector<double>(const RealVector<double>&)>& grad_a,
                                         double hbar = 1.0) {
  if (grid.dim != 2) throw std::invalid_argument("prequantum operator expects a 2-D (q,p) grid");
  auto field = VectorField::hamiltonian_2d(grad_a);
  SparseComplex advection(grid.size(), grid.size());
  for (int ax = 0; ax < 2; ++ax) {
    const SparseReal d = detail::central_derivative(grid, ax);
    const RealVector<double> v = detail::sample_velocity(grid, field, ax, 0.0);
    // i hbar {A, .} = -i hbar V_A . grad
    advection += SparseComplex(SparseReal(v.asDiagonal() * d).cast<Complex<double>>() * Complex<double>(0, -hbar));
  }
  std::vector<Eigen::Triplet<Complex<double>>> trip;
  for (Index i = 0; i < grid.size(); ++i) {
    const RealVector<double> z = grid.point(i);
    trip.emplace_back(i, i, Complex<double>(a(z) - z[1] * grad_a(z)[1], 0));
  }
  SparseComplex diag(grid.size(), grid.size());
  diag.setFromTriplets(trip.begin(), trip.end());
  return SparseComplex(advection + diag);
}

// ---------------------------------------------------------------------------
// Integrable action-angle fast path

// psi(r, c) for action surface r and angle mode c gains the phase
// exp(-i omega(J_r) . k_c t); exact and fast-forwardable for any t.
inline ComplexMatrix<double> integrable_propagate(const ComplexMatrix<double>& psi,
                                                  const RealMatrix<double>& omega,  // surfaces x d
                                                  const Eigen::MatrixXi& modes,     // modes x d
                                                  double t) {
  if (psi.rows() != omega.rows() || psi.cols() != modes.rows() || omega.cols() != modes.cols())
    throw std::invalid_argument("integrable_propagate shape mismatch");
  ComplexMatrix<double> out(psi.rows(), psi.cols());
  for (Index r = 0; r < psi.rows(); ++r)
    for (Index c = 0; c < psi.cols(); ++c) {
      double wk = 0;
      for (Index d = 0; d < omega.cols(); ++d) wk += omega(r, d) * static_cast<double>(modes(c, d));
      out(r, c) = psi(r, c) * std::polar(1.0, -wk * t);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Carleman linearization (1-D polynomial fields, monomial basis)

struct CarlemanSystem {
  Index order = 0;           // N_C
  RealMatrix<double> gen;    // (N_C+1)x(N_C+1) on y_k = z^k, k = 0..N_C; row 0 is the constant slot
  double scale = 1.0;        // z = scale * u + shift applied before embedding
  double shift = 0.0;
};

// d(z^k)/dt = k z^{k-1} sum_m c_m z^m -> gen[k][k+m-1] = k c_m, rows clipped
// at the truncation order.
inline CarlemanSystem carleman_build(const VectorField& field, Index order) {
  if (field.poly.empty()) throw std::invalid_argument("carleman_build needs a polynomial coefficient table");
  if (order < 1 || order + 1 < static_cast<Index>(field.poly.size()))
    throw std::invalid_argument("truncation order must reach the polynomial degree");
  CarlemanSystem sys;
  sys.order = order;
  sys.gen = RealMatrix<double>::Zero(order + 1, order + 1);
  for (Index k = 1; k <= order; ++k)
    for (std::size_t m = 0; m < field.poly.size(); ++m) {
      const Index col = k + static_cast<Index>(m) - 1;
      if (col <= order) sys.gen(k, col) = static_cast<double>(k) * field.poly[m];
    }
  return sys;
}

struct CarlemanTrajectory {
  RealVector<double> z;     // reconstructed trajectory (original coordinates)
  RealVector<double> tail;  // |y_{N_C}| truncation diagnostic
  bool domain_exit = false; // |y_1| approached the unit-disk boundary
};

// theta = 1/2 integration of dy/dt = C y from y_k(0) = u0^k.
inline CarlemanTrajectory carleman_propagate(const CarlemanSystem& sys, double z0, double dt, Index n_steps,
                                             double domain_guard = 0.98) {
  const Index n = sys.order + 1;
  RealVector<double> y(n);
  const double u0 = (z0 - sys.shift) / sys.scale;
  double up = 1.0;
  for (Index k = 0; k < n; ++k) {
    y[k] = up;
    up *= u0;
  }

  const RealMatrix<double> lhs = RealMatrix<double>::Identity(n, n) - 0.5 * dt * sys.gen;
  const RealMatrix<double> rhs = RealMatrix<double>::Identity(n, n) + 0.5 * dt * sys.gen;
  Eigen::PartialPivLU<RealMatrix<double>> lu(lhs);

  CarlemanTrajectory out;
  out.z.resize(n_steps + 1);
  out.tail.resize(n_steps + 1);
  out.z[0] = z0;
  out.tail[0] = std::abs(y[sys.order]);
  for (Index s = 1; s <= n_steps; ++s) {
    y = lu.solve(rhs * y);
    if (std::abs(y[1]) > domain_guard) out.domain_exit = true;
    out.z[s] = sys.scale * y[1] + sys.shift;
    out.tail[s] = std::abs(y[sys.order]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory oracle (RK4)

inline RealMatrix<double> rk4_trajectory(const VectorField& field, const RealVector<double>& z0, double dt,
                                         Index n_steps) {
  double vscale = std::max(1.0, field.velocity(0.0, z0).cwiseAbs().maxCoeff());
  if (dt * vscale > 1.0) throw std::invalid_argument("rk4_trajectory: step too large");
  RealMatrix<double> traj(n_steps + 1, z0.size());
  traj.row(0) = z0.transpose();
  RealVector<double> z = z0;
  for (Index s = 1; s <= n_steps; ++s) {
    const double t = dt * static_cast<double>(s - 1);
    const RealVector<double> k1 = field.velocity(t, z);
    const RealVector<double> k2 = field.velocity(t + dt / 2, z + (dt / 2) * k1);
    const RealVector<double> k3 = field.velocity(t + dt / 2, z + (dt / 2) * k2);
    const RealVector<double> k4 = field.velocity(t + dt, z + dt * k3);
    z += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    traj.row(s) = z.transpose();
  }
  return traj;
}

struct EnsembleObservable {
  RealVector<double> mean;    // per time step
  RealVector<double> stderr_; // standard error of the mean
};

inline EnsembleObservable rk4_ensemble_observable(const VectorField& field, const RealMatrix<double>& z0s, double dt,
                                                  Index n_steps,
                                                  const std::function<double(const RealVector<double>&)>& obs) {
  const Index m = z0s.rows();
  if (m < 1) throw std::invalid_argument("empty ensemble");
  RealMatrix<double> acc = RealMatrix<double>::Zero(n_steps + 1, 2);  // sum, sum of squares
  for (Index i = 0; i < m; ++i) {
    const RealMatrix<double> traj = rk4_trajectory(field, z0s.row(i).transpose(), dt, n_steps);
    for (Index s = 0; s <= n_steps; ++s) {
      const double v = obs(traj.row(s).transpose());
      acc(s, 0) += v;
      acc(s, 1) += v * v;
    }
  }
  EnsembleObservable out;
  out.mean = acc.col(0) / static_cast<double>(m);
  out.stderr_.resize(n_steps + 1);
  for (Index s = 0; s <= n_steps; ++s) {
    const double var = std::max(0.0, acc(s, 1) / static_cast<double>(m) - out.mean[s] * out.mean[s]);
    out.stderr_[s] = std::sqrt(var / static_cast<double>(m));
  }
  return out;
}

// Estimate the excursion of the RK4 oracle trajectory and return an affine
// rescaling z = scale*u + shift that keeps |u| <= target inside the unit
// disk. Identity when the raw trajectory already fits.
inline CarlemanSystem carleman_build_rescaled(const VectorField& field, Index order, double z0, double horizon,
                                              double oracle_dt = 1e-3, double target = 0.8) {
  RealVector<double> start(1);
  start[0] = z0;
  const Index steps = static_cast<Index>(std::ceil(horizon / oracle_dt));
  const RealMatrix<double> traj = rk4_trajectory(field, start, oracle_dt, steps);
  const double zmax = traj.col(0).maxCoeff(), zmin = traj.col(0).minCoeff();

  double scale = 1.0, shift = 0.0;
  if (std::max(std::abs(zmax), std::abs(zmin)) > target) {
    shift = 0.5 * (zmax + zmin);
    scale = std::max(1e-12, 0.5 * (zmax - zmin) / target);
    scale = std::max(scale, (std::max(std::abs(zmax - shift), std::abs(zmin - shift))) / target);
  }

  // Recompose P(scale*u + shift)/scale in powers of u.
  const std::size_t deg = field.poly.size();
  std::vector<double> rescaled(deg, 0.0);
  for (std::size_t m = 0; m < deg; ++m) {
    // c_m (scale*u + shift)^m expanded binomially.
    double binom = 1.0;
    for (std::size_t j = 0; j <= m; ++j) {
      rescaled[j] += field.poly[m] * binom * std::pow(scale, static_cast<double>(j)) *
                     std::pow(shift, static_cast<double>(m - j)) / scale;
      binom *= static_cast<double>(m - j) / static_cast<double>(j + 1);
    }
  }
  auto sys = carleman_build(VectorField::polynomial_1d(std::move(rescaled)), order);
  sys.scale = scale;
  sys.shift = shift;
  return sys;
}

}  // namespace qfes
