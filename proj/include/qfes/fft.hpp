// fft.hpp
// Radix-2 FFT used by the split-step map propagator and the fast QFT path.
// Conventions are pinned here once:
//   dft:  X_k = sum_j x_j exp(-2*pi*i*j*k/N)            (unnormalized)
//   qft:  X_k = sum_j x_j exp(+2*pi*i*j*k/N) / sqrt(N)  (matches the circuit)

#pragma once

#include <stdexcept>

#include "qfes/types.hpp"

namespace qfes {

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

namespace detail {

// In-place iterative Cooley-Tukey; sign = -1 for the dft, +1 for its inverse.
template <typename Real>
void fft_radix2(ComplexVector<Real>& x, int sign) {
  const Index n = x.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");

  for (Index i = 1, j = 0; i < n; ++i) {
    Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (Index len = 2; len <= n; len <<= 1) {
    const Real ang = Real(sign) * Real(2) * pi_v<Real> / Real(len);
    const Complex<Real> wlen(std::cos(ang), std::sin(ang));
    for (Index i = 0; i < n; i += len) {
      Complex<Real> w(1, 0);
      for (Index k = 0; k < len / 2; ++k) {
        const Complex<Real> u = x[i + k];
        const Complex<Real> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

template <typename Real>
void dft_inplace(ComplexVector<Real>& x) {
  detail::fft_radix2(x, -1);
}

template <typename Real>
void idft_inplace(ComplexVector<Real>& x) {
  detail::fft_radix2(x, +1);
  x /= Real(x.size());
}

// Unitary transform with the +i kernel; equals the circuit QFT on 2^n states.
template <typename Real>
void qft_inplace(ComplexVector<Real>& x) {
  detail::fft_radix2(x, +1);
  x /= std::sqrt(Real(x.size()));
}

template <typename Real>
void iqft_inplace(ComplexVector<Real>& x) {
  detail::fft_radix2(x, -1);
  x /= std::sqrt(Real(x.size()));
}

}  // namespace qfes
