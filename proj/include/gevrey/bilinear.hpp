#pragma once

#include <cstdint>

#include "gevrey/field.hpp"

namespace gevrey {

// Empirical suprema of |B(u,v)|_{alpha,sigma} divided by the structural part
// of each bound, over random solenoidal pairs.  The structural parts are the
// bracketed norm combinations times 4^alpha for the two split bounds, and
// |u|_{alpha+1/2,sigma} |v|_{alpha+1/2,sigma} for the product bound (which is
// only defined for alpha >= 1/2).
struct BilinearRatioReport {
  double alpha = 0.0;
  double sigma = 0.0;
  int samples = 0;
  int used_samples = 0;
  std::uint64_t seed = 0;
  double max_ratio_b1 = 0.0;
  double max_ratio_b2 = 0.0;
  double max_ratio_aalphab = 0.0;
  bool aalphab_valid = false;
};

// Galerkin-truncated advection term P_Lambda P (u . grad v) by exact
// convolution over the stored modes.  Inputs must be solenoidal and share a
// truncation; the output is Leray-projected and marked solenoidal.
SpectralField bilinear(const SpectralField& u, const SpectralField& v);

// Independent check: evaluates u and grad v on a physical grid fine enough
// for exact trigonometric quadrature of the product, multiplies pointwise,
// transforms back by direct summation, projects and truncates.
SpectralField bilinear_oracle(const SpectralField& u, const SpectralField& v);

BilinearRatioReport probe_inequalities(Truncation truncation, double alpha, double sigma, int samples,
                                       std::uint64_t seed);

// Empirical base K such that the product-bound ratio stays below K^alpha over
// an alpha sweep {1/2, 1, 2, 4}, and grows at most geometrically between
// consecutive sweep points.  Clamped below by 1.
double estimate_bilinear_constant(Truncation truncation, double sigma, int samples, std::uint64_t seed);

// Per-sample seed derivation used by the probes (stable under any schedule).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Worker count for the convolution's output loop.  Results are bit-identical
// for any setting; defaults to 1.
void set_bilinear_threads(int threads);

}  // namespace gevrey
