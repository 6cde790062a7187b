#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace icelab {

/// Heights, positions and rotations. Signed so that differences of rotations
/// and signed levels need no casts.
using Index = std::int64_t;

/// Alphabet index of a symbol inside a Word.
using Symbol = std::uint16_t;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using VectorXcd = ComplexVector<double>;
using VectorXd = RealVector<double>;

}  // namespace icelab
