#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "gevrey/lattice.hpp"
#include "gevrey/types.hpp"

namespace gevrey {

// Parameters (alpha, sigma) of the weighted norm |A^alpha e^{sigma A^{1/2}} u|.
struct GevreyParams {
  double alpha = 0.0;
  double sigma = 0.0;
};

// Truncated Fourier representation of a real, zero-average vector field on the
// 2pi-torus.  One amplitude is stored per {k,-k} pair; the conjugate partner
// is implied, so realness holds by construction.
class SpectralField {
 public:
  explicit SpectralField(std::shared_ptr<const ModeTable> modes);

  static SpectralField zero(std::shared_ptr<const ModeTable> modes) { return SpectralField(std::move(modes)); }

  const ModeTable& modes() const { return *modes_; }
  const std::shared_ptr<const ModeTable>& mode_table() const { return modes_; }
  int max_eigenvalue() const { return modes_->max_eigenvalue(); }

  // 3 x rep_count complex amplitudes, columns aligned with modes().reps().
  CoeffMatrix& coeffs() { return coeffs_; }
  const CoeffMatrix& coeffs() const { return coeffs_; }

  // Amplitude at an arbitrary lattice vector (conjugated when k is not the
  // stored representative); zero outside the truncation.
  Amplitude coeff(const WaveVector& k) const;
  // Assigns the amplitude of the {k,-k} pair; the value is conjugated into the
  // representative slot when k itself is not stored.
  void set_coeff(const WaveVector& k, const Amplitude& value);

  bool solenoidal() const { return solenoidal_; }
  void mark_solenoidal(bool value) { solenoidal_ = value; }

  bool all_finite() const { return coeffs_.allFinite(); }
  bool is_zero() const { return coeffs_.isZero(0.0); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scalar);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField f) { return f *= s; }

 private:
  std::shared_ptr<const ModeTable> modes_;
  CoeffMatrix coeffs_;
  bool solenoidal_ = false;
};

void require_same_truncation(const SpectralField& u, const SpectralField& v);

// Orthogonal projection onto divergence-free fields: u(k) -= (k.u(k)) k/|k|^2.
SpectralField leray_project(const SpectralField& f);

// Scales each amplitude by |k|^{2 alpha} e^{sigma |k|}.  Requires alpha,
// sigma >= 0; negative exponential weights go through apply_smoothing.
SpectralField apply_gevrey_multiplier(const SpectralField& u, const GevreyParams& p);

// A^alpha e^{-A^{1/2}} u, the smoothing direction of the exponential weight.
SpectralField apply_smoothing(const SpectralField& u, double alpha);

// sqrt(8 pi^3 sum_k |k|^{4 alpha} e^{2 sigma |k|} |u(k)|^2) over the full
// (conjugate-completed) lattice.
double gevrey_norm(const SpectralField& u, const GevreyParams& p);
double l2_norm(const SpectralField& u);        // |u| = |u|_{0,0}
double dirichlet_norm(const SpectralField& u); // ||u|| = |u|_{1/2,0}

// R_n: retains the shell |k|^2 == n (zero field when the shell is empty).
SpectralField shell_project(const SpectralField& u, int eigenvalue);
// P_n = R_1 + ... + R_n.
SpectralField low_pass_project(const SpectralField& u, int eigenvalue);

// 8 pi^3 Re sum_k u(k) . conj(v(k)).
double inner_product(const SpectralField& u, const SpectralField& v);

// Spot check of k.u(k) = 0 for all stored modes, relative to the field size.
bool divergence_free_within(const SpectralField& u, double rel_tol);

// Named initial-condition presets.
//
// A single +-k pair with a deterministic real polarization orthogonal to k;
// an exact exponentially-decaying solution of the truncated system.
SpectralField single_mode_field(std::shared_ptr<const ModeTable> modes, const WaveVector& k, double amplitude);
// The ABC Beltrami flow: curl u = u, so the self-advection term is a pure
// gradient and the solution is exactly e^{-t} u0.
SpectralField beltrami_abc_field(std::shared_ptr<const ModeTable> modes, double a, double b, double c);
// I.i.d. complex Gaussian amplitudes with spectral decay e^{-decay |k|},
// Leray-projected, rescaled so that ||u|| = |u|_{1/2,0} equals `amplitude`.
SpectralField random_small_field(std::shared_ptr<const ModeTable> modes, std::uint64_t seed, double amplitude,
                                 double decay);
// Unscaled random solenoidal field used by the inequality probes.
SpectralField random_solenoidal_field(std::shared_ptr<const ModeTable> modes, std::uint64_t seed, double decay);

// Binary snapshot: header (magic, version, truncation, shell count) followed
// by one record per stored representative (3 x int32, 6 x float64),
// little-endian, bit-exact round trip.
void save_snapshot(const SpectralField& u, const std::filesystem::path& file);
SpectralField load_snapshot(const std::filesystem::path& file);

}  // namespace gevrey
