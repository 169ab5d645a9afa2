// rkhs.hpp
// Holomorphic reproducing-kernel Hilbert spaces: metric moments of a weight
// function, ladder operators satisfying the CCR, truncated kernel series,
// reproduction checks, and coherent-state expansions.
//
// Two metric conventions are first class; the standard sqrt(j) ladder pair
// and the factorial-normalized moment table each arise under a different
// normalization:
//   raw moments          M_jk = integral conj(z)^j z^k G dA / Omega
//   factorial-normalized rho_jk = M_jk / (j! k!)
// The conversion factor j!k! is exposed through the enum. The named spaces:
//   Segal-Bargmann  G = exp(-|z|^2) on C,        M_jj = j!,      rho_jj = 1/j!
//   Bergman         G = 1 on the unit disk,      M_jj = 1/(j+1), rho_jj = 1/((j+1)! j!)
//   Hardy           boundary measure on |z| = 1, M_jj = 1,       rho_jj = 1/j!^2
// (The Hardy normalization absorbs the circle measure into Omega so the
// table above holds.)

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "qfes/types.hpp"

namespace qfes {

enum class RkhsKind { segal_bargmann, bergman, hardy, custom };
enum class MetricConvention { raw_moment, factorial_normalized };

// Which operator raises in the monomial picture: multiplication by z raises
// with unit weight and d/dz lowers with weight j, or the adjoint-swapped
// assignment. Both satisfy the CCR.
enum class LadderConvention { multiplication_raises, derivative_raises };

struct RkhsSpace {
  RkhsKind kind = RkhsKind::segal_bargmann;
  MetricConvention convention = MetricConvention::raw_moment;
  // Custom spaces: radial weight G(r) over the plane, integrated against the
  // area measure dA/pi out to r_max.
  std::function<double(double)> radial_weight;
  double r_max = 1.0;

  static RkhsSpace named(RkhsKind kind, MetricConvention conv = MetricConvention::raw_moment) {
    if (kind == RkhsKind::custom) throw std::invalid_argument("custom spaces need a weight function");
    RkhsSpace s;
    s.kind = kind;
    s.convention = conv;
    return s;
  }

  static RkhsSpace custom(std::function<double(double)> weight, double r_max,
                          MetricConvention conv = MetricConvention::raw_moment) {
    RkhsSpace s;
    s.kind = RkhsKind::custom;
    s.convention = conv;
    s.radial_weight = std::move(weight);
    s.r_max = r_max;
    return s;
  }

  bool unit_disk_domain() const { return kind == RkhsKind::bergman || kind == RkhsKind::hardy; }
};

namespace detail {

// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on P_n.
inline void gauss_legendre_unit(int n, RealVector<double>& x, RealVector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 0, p1 = 0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1);
      }
      const double dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    p1 = 0.0;
    p0 = 1.0;
    for (int j = 0; j < n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1);
    }
    const double dp = n * (t * p0 - p1) / (t * t - 1.0);
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Composite Gauss rule: n_panels x 40 nodes over [0, length].
inline void composite_gauss(double length, int n_panels, RealVector<double>& x, RealVector<double>& w) {
  RealVector<double> xu, wu;
  gauss_legendre_unit(40, xu, wu);
  const double h = length / n_panels;
  x.resize(40 * n_panels);
  w.resize(40 * n_panels);
  for (int p = 0; p < n_panels; ++p)
    for (int q = 0; q < 40; ++q) {
      x[40 * p + q] = h * (p + xu[q]);
      w[40 * p + q] = h * wu[q];
    }
}

// Raw radial moment integral m_j = 2 int r^(2j+1) G(r) dr over [0, r_max]
// (the angular integral contributes 2 pi / Omega = 2 with Omega = pi).
inline double raw_radial_moment(const RkhsSpace& space, Index j, double* tail_estimate = nullptr) {
  switch (space.kind) {
    case RkhsKind::segal_bargmann: {
      // In u = r^2 the integrand is u^j e^-u with exact value j!.
      const double cut = 60.0 + 10.0 * static_cast<double>(j);
      RealVector<double> x, w;
      composite_gauss(cut, 8 + static_cast<int>(j / 4), x, w);
      double sum = 0;
      for (Index q = 0; q < x.size(); ++q) sum += w[q] * std::pow(x[q], static_cast<double>(j)) * std::exp(-x[q]);
      if (tail_estimate)
        *tail_estimate = std::pow(cut, static_cast<double>(j)) * std::exp(-cut) * (1.0 + static_cast<double>(j));
      return sum;
    }
    case RkhsKind::bergman: {
      RealVector<double> x, w;
      composite_gauss(1.0, 2, x, w);
      double sum = 0;
      for (Index q = 0; q < x.size(); ++q) sum += 2.0 * w[q] * std::pow(x[q], 2.0 * static_cast<double>(j) + 1.0);
      if (tail_estimate) *tail_estimate = 0.0;
      return sum;
    }
    case RkhsKind::hardy:
      // Boundary measure normalized so every moment is 1.
      if (tail_estimate) *tail_estimate = 0.0;
      return 1.0;
    case RkhsKind::custom: {
      if (!space.radial_weight) throw std::invalid_argument("custom space lacks a weight");
      RealVector<double> x, w;
      composite_gauss(space.r_max, 8, x, w);
      double sum = 0;
      for (Index q = 0; q < x.size(); ++q)
        sum += 2.0 * w[q] * std::pow(x[q], 2.0 * static_cast<double>(j) + 1.0) * space.radial_weight(x[q]);
      const double edge = space.radial_weight(space.r_max) *
                          std::pow(space.r_max, 2.0 * static_cast<double>(j) + 1.0) * space.r_max * 1e-2;
      if (tail_estimate) *tail_estimate = edge;
      if (edge > 1e-6 * std::abs(sum))
        throw std::runtime_error("metric quadrature: weight has not decayed at r_max");
      return sum;
    }
  }
  throw std::logic_error("unreachable");
}

inline double log_factorial(Index j) { return std::lgamma(static_cast<double>(j) + 1.0); }

}  // namespace detail

// Metric matrix up to order J under the space's convention. Rotation
// invariance of the radial weights makes the matrix diagonal; the angular
// integral is exact.
inline RealMatrix<double> metric_moments(const RkhsSpace& space, Index max_order) {
  if (max_order < 0) throw std::invalid_argument("metric order must be >= 0");
  RealMatrix<double> m = RealMatrix<double>::Zero(max_order + 1, max_order + 1);
  for (Index j = 0; j <= max_order; ++j) {
    double raw = detail::raw_radial_moment(space, j);
    if (space.convention == MetricConvention::factorial_normalized)
      raw *= std::exp(-2.0 * detail::log_factorial(j));
    m(j, j) = raw;
  }
  return m;
}

struct LadderPair {
  RealMatrix<double> raising;   // W
  RealMatrix<double> lowering;  // Z
  LadderConvention convention;

  // || [Z, W] - I || on the interior block (truncation row excluded).
  double ccr_defect() const {
    const Index n = raising.rows();
    RealMatrix<double> comm = lowering * raising - raising * lowering - RealMatrix<double>::Identity(n, n);
    return comm.topLeftCorner(n - 1, n - 1).cwiseAbs().maxCoeff();
  }
};

// W, Z from the metric ratios r_j = sqrt(m_jj / m_{j-1,j-1}):
//   multiplication_raises: W_{j,j-1} = r_j,      Z_{j-1,j} = j / r_j
//   derivative_raises:     W_{j,j-1} = j / r_j,  Z_{j-1,j} = r_j
// Under raw moments these reproduce the Segal-Bargmann sqrt(j) pair and the
// Hardy (1, j) / (j, 1) pairs.
inline LadderPair ladder_operators(const RkhsSpace& space, Index max_order, LadderConvention conv) {
  const RealMatrix<double> metric = metric_moments(space, max_order);
  for (Index j = 0; j <= max_order; ++j)
    if (!(metric(j, j) > 0)) throw std::runtime_error("metric is not positive definite");

  LadderPair out;
  out.convention = conv;
  out.raising = RealMatrix<double>::Zero(max_order + 1, max_order + 1);
  out.lowering = RealMatrix<double>::Zero(max_order + 1, max_order + 1);
  for (Index j = 1; j <= max_order; ++j) {
    const double ratio = std::sqrt(metric(j, j) / metric(j - 1, j - 1));
    const double up = conv == LadderConvention::multiplication_raises ? ratio : static_cast<double>(j) / ratio;
    const double down = static_cast<double>(j) / up;
    out.raising(j, j - 1) = up;
    out.lowering(j - 1, j) = down;
  }
  return out;
}

struct KernelValue {
  Complex<double> value{0, 0};
  double tail_bound = 0;  // magnitude estimate of the dropped series tail
};

// Truncated reproducing-kernel series K_y(z) = sum_j (conj(y) z)^j / M_jj,
// with M the raw moments (the convention-independent combination).
inline KernelValue kernel_eval(const RkhsSpace& space, Complex<double> y, Complex<double> z, Index max_order) {
  if (space.unit_disk_domain() && (std::abs(y) >= 1.0 || std::abs(z) >= 1.0))
    throw std::invalid_argument("Bergman/Hardy kernels live inside the unit disk");
  KernelValue out;
  const Complex<double> x = std::conj(y) * z;
  Complex<double> xpow(1, 0);
  for (Index j = 0; j <= max_order; ++j) {
    out.value += xpow / detail::raw_radial_moment(space, j);
    xpow *= x;
  }
  // Tail estimate from the first two dropped terms; xpow now holds x^(J+1).
  const double t1 = std::abs(xpow) / detail::raw_radial_moment(space, max_order + 1);
  const double t2 = std::abs(xpow * x) / detail::raw_radial_moment(space, max_order + 2);
  const double ratio = t1 > 0 ? t2 / t1 : 0.0;
  out.tail_bound = ratio < 1.0 ? t1 / (1.0 - ratio) : t1;
  return out;
}

// Quadrature inner product <K_y, f> for a polynomial f given by coefficients;
// equals f(y) by the reproducing property.
inline Complex<double> kernel_inner_product(const RkhsSpace& space, const ComplexVector<double>& poly_coeffs,
                                            Complex<double> y, Index max_order) {
  // <K_y, f> = sum_j y^j / M_jj * integral conj(z)^j f(z) G dA / Omega
  //          = sum_j y^j / M_jj * c_j M_jj = sum_j c_j y^j,
  // realized numerically: radial Gauss x uniform angular quadrature of the
  // integrand (boundary trapezoid for Hardy), then the kernel contraction.
  const Index terms = std::min<Index>(max_order + 1, poly_coeffs.size());
  Complex<double> result(0, 0);

  if (space.kind == RkhsKind::hardy) {
    const int n_ang = 4 * static_cast<int>(max_order + poly_coeffs.size()) + 8;
    for (Index j = 0; j < terms; ++j) {
      Complex<double> moment(0, 0);
      for (int a = 0; a < n_ang; ++a) {
        const double th = 2 * kPi * a / n_ang;
        const Complex<double> zz = std::polar(1.0, th);
        Complex<double> f(0, 0), zp(1, 0);
        for (Index k = 0; k < poly_coeffs.size(); ++k) {
          f += poly_coeffs[k] * zp;
          zp *= zz;
        }
        moment += std::pow(std::conj(zz), static_cast<double>(j)) * f;
      }
      moment /= static_cast<double>(n_ang);
      Complex<double> ypow(1, 0);
      for (Index k = 0; k < j; ++k) ypow *= y;
      result += ypow * moment;  // M_jj = 1 for Hardy
    }
    return result;
  }

  // Planar spaces: composite radial Gauss rule x uniform angular rule, with
  // the u = r^2 substitution for the Gaussian weight.
  const int n_ang = 4 * static_cast<int>(max_order + poly_coeffs.size()) + 8;
  const bool gaussian = space.kind == RkhsKind::segal_bargmann;
  RealVector<double> x, w;
  if (gaussian) {
    const double cut_u = 60.0 + 10.0 * static_cast<double>(max_order + poly_coeffs.size());
    detail::composite_gauss(cut_u, 8 + static_cast<int>(max_order / 4), x, w);
  } else {
    detail::composite_gauss(space.kind == RkhsKind::bergman ? 1.0 : space.r_max, 4, x, w);
  }

  auto angular_average = [&](double r, Index j) {
    Complex<double> acc(0, 0);
    for (int a = 0; a < n_ang; ++a) {
      const double th = 2 * kPi * a / n_ang;
      const Complex<double> zz = std::polar(r, th);
      Complex<double> f(0, 0), zp(1, 0);
      for (Index k = 0; k < poly_coeffs.size(); ++k) {
        f += poly_coeffs[k] * zp;
        zp *= zz;
      }
      acc += std::pow(std::conj(zz), static_cast<double>(j)) * f;
    }
    return acc / static_cast<double>(n_ang);
  };

  for (Index j = 0; j < terms; ++j) {
    Complex<double> moment(0, 0);
    for (Index q = 0; q < x.size(); ++q) {
      if (gaussian) {
        const double u = x[q];
        moment += w[q] * std::exp(-u) * angular_average(std::sqrt(u), j);  // dA/pi = du dtheta/(2 pi)
      } else {
        const double r = x[q];
        const double g = space.kind == RkhsKind::bergman ? 1.0 : space.radial_weight(r);
        moment += w[q] * 2.0 * r * g * angular_average(r, j);
      }
    }
    Complex<double> ypow(1, 0);
    for (Index k = 0; k < j; ++k) ypow *= y;
    result += ypow * moment / detail::raw_radial_moment(space, j);
  }
  return result;
}

// |<K_y, f> - f(y)| for a polynomial within the truncated space.
inline double reproduce_check(const RkhsSpace& space, const ComplexVector<double>& poly_coeffs, Complex<double> y,
                              Index max_order) {
  if (poly_coeffs.size() > max_order + 1) throw std::invalid_argument("polynomial degree exceeds the truncation");
  Complex<double> direct(0, 0), ypow(1, 0);
  for (Index k = 0; k < poly_coeffs.size(); ++k) {
    direct += poly_coeffs[k] * ypow;
    ypow *= y;
  }
  return std::abs(kernel_inner_product(space, poly_coeffs, y, max_order) - direct);
}

struct CoherentExpansion {
  ComplexVector<double> coeffs;   // number-basis coefficients of e^{y W}|0>
  double eigen_residual = 0;      // ||Z|y> - y|y>|| on the interior block
};

// |y> = e^{y W}|0> in the normalized number basis: c_j = y^j / j! *
// prod_k W_{k,k-1}. Under derivative_raises for Hardy this gives plain y^j.
inline CoherentExpansion coherent_expand(const RkhsSpace& space, Complex<double> y, Index max_order,
                                         LadderConvention conv = LadderConvention::multiplication_raises) {
  if (space.unit_disk_domain() && std::abs(y) >= 1.0)
    throw std::invalid_argument("coherent label outside the unit-disk domain");
  const LadderPair ladder = ladder_operators(space, max_order, conv);
  CoherentExpansion out;
  out.coeffs.resize(max_order + 1);
  Complex<double> c(1, 0);
  out.coeffs[0] = c;
  for (Index j = 1; j <= max_order; ++j) {
    c *= y * ladder.raising(j, j - 1) / static_cast<double>(j);
    out.coeffs[j] = c;
  }
  ComplexVector<double> lowered = ladder.lowering * out.coeffs - y * out.coeffs;
  out.eigen_residual = lowered.head(max_order).norm();  // interior block
  return out;
}

inline const char* rkhs_kind_name(RkhsKind k) {
  switch (k) {
    case RkhsKind::segal_bargmann: return "segal-bargmann";
    case RkhsKind::bergman: return "bergman";
    case RkhsKind::hardy: return "hardy";
    default: return "custom";
  }
}

}  // namespace qfes
