#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "gevrey/analysis.hpp"
#include "gevrey/dynamics.hpp"
#include "gevrey/polyalg.hpp"

namespace gevrey {

// Fitted exponential model of an improper-integral tail beyond the stored
// horizon; `fitted` is false when the integrand was identically zero or below
// the rounding floor, in which case the tail was taken as zero.
struct TailFit {
  double amplitude = 0.0;
  double rate = 0.0;
  bool fitted = false;
};

// Terms q_1..q_N extracted from one trajectory, with the per-term tail models
// used for the resonant integrals.  sigma_extract selects the norm used for
// tail fitting; the terms themselves do not depend on it.
class ExpansionState {
 public:
  ExpansionState(std::shared_ptr<const Trajectory> source, double sigma_extract)
      : source_(std::move(source)), sigma_extract_(sigma_extract) {}

  const Trajectory& source() const { return *source_; }
  const std::shared_ptr<const Trajectory>& source_ptr() const { return source_; }
  double sigma_extract() const { return sigma_extract_; }

  int depth() const { return static_cast<int>(terms_.size()); }
  const std::vector<ExpansionTerm>& terms() const { return terms_; }
  const ExpansionTerm& term(int n) const { return terms_[static_cast<size_t>(n) - 1]; }
  const std::vector<TailFit>& tail_models() const { return tail_models_; }

  void append(ExpansionTerm term, TailFit tail);

  // ubar_N(t) = sum_{n<=count} q_n(t) e^{-nt}; count = -1 means all terms.
  SpectralField partial_sum(double t, int count = -1) const;

  // Copy with coefficient `coeff_index` of q_n scaled by `factor`.
  ExpansionState perturbed(int n, int coeff_index, double factor) const;
  // Copy with coefficient `coeff_index` of q_n replaced.
  ExpansionState with_coefficient(int n, int coeff_index, SpectralField value) const;

  // Shells on which q_n has support.
  std::vector<int> shell_support(int n) const;
  // |R_n q_n(0)|, the resonant constant's norm.
  double resonant_norm(int n) const;

 private:
  std::shared_ptr<const Trajectory> source_;
  double sigma_extract_;
  std::vector<ExpansionTerm> terms_;
  std::vector<TailFit> tail_models_;
};

// Base level: q_1 = xi_1 constant on shell 1, from the shell-1 projection of
// the trajectory and the exponentially weighted advection integral with a
// fitted tail.
ExpansionTerm extract_q1(const Trajectory& traj, double sigma_extract, TailFit* tail_out = nullptr);

// h_N(t) = -B(v_N,u) - B(ubar_N,v_N) - sum_{m,j<=N, m+j>=N+2} B(u_m,u_j),
// evaluated at a stored sample time.
SpectralField compute_hN(const Trajectory& traj, const ExpansionState& state, double t);

// Builds q_{N+1} from the three spectral regimes: the closed-form polynomial
// solve off resonance and the trajectory integral for the resonant constant
// on shell N+1.
ExpansionTerm extract_next_term(const Trajectory& traj, const ExpansionState& state, TailFit* tail_out = nullptr);

// Runs extract_q1 followed by extract_next_term up to `depth` terms.
ExpansionState extract_terms(std::shared_ptr<const Trajectory> traj, int depth, double sigma_extract);

// |v_N(t)|_{alpha,sigma} at every stored sample, with v_N = u - ubar_N and
// n_terms = 0 giving |u(t)| itself.
std::vector<double> remainder_series(const Trajectory& traj, const ExpansionState& state, int n_terms,
                                     const GevreyParams& p);

// Max over samples of |q_n' - n q_n + A q_n + sum_{m+j=n} B(q_m,q_j)|_{0,0},
// normalized by the max of |q_n|_{0,0} (zero when q_n is identically zero).
double ode_residual(const ExpansionState& state, int n, const std::vector<double>& t_samples);

// Directory layout: manifest, per-term coefficient snapshots, and a
// human-readable summary of shell supports, degrees and resonant norms.
void save_expansion(const ExpansionState& state, const std::filesystem::path& dir);
ExpansionState load_expansion(const std::filesystem::path& dir, std::shared_ptr<const Trajectory> source);

}  // namespace gevrey
