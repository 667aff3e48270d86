#pragma once

#include <complex>

#include <Eigen/Core>

namespace gevrey {

// Scalar of the spectral state layout.  Every field amplitude, multiplier and
// norm goes through these aliases, so an extended-precision build is a
// one-line change here (snapshot files stay float64 regardless).
using Real = double;
using Complex = std::complex<Real>;
using Amplitude = Eigen::Matrix<Complex, 3, 1>;
using CoeffMatrix = Eigen::Matrix<Complex, 3, Eigen::Dynamic>;

}  // namespace gevrey
