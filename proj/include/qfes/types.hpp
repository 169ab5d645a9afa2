// types.hpp
// Shared scalar-templated dense types. Eigen is the only math dependency.

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qfes {

template <typename Real = double>
using Complex = std::complex<Real>;

template <typename Real = double>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real = double>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real = double>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real = double>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

template <typename Real = double>
constexpr Real pi_v = Real(3.14159265358979323846264338327950288L);

inline constexpr double kPi = pi_v<double>;

}  // namespace qfes
