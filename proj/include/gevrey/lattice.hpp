#pragma once

#include <Eigen/Core>
#include <memory>
#include <utility>
#include <vector>

namespace gevrey {

// Integer wavevector on the dual lattice of the 2pi-periodic box.  The zero
// vector is excluded everywhere (zero-average fields).
using WaveVector = Eigen::Vector3i;

// All wavevectors k with |k|^2 == eigenvalue, in lexicographic order.
// The member list is empty when the eigenvalue is not a sum of three squares.
struct Shell {
  int eigenvalue = 0;
  std::vector<WaveVector> members;
};

// Spherical Galerkin cutoff: modes with |k|^2 <= max_eigenvalue are retained.
struct Truncation {
  int max_eigenvalue = 1;
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

Shell enumerate_shell(int eigenvalue);

// Strictly increasing list of n <= max_eigenvalue with a nonempty shell.
std::vector<int> stokes_spectrum(int max_eigenvalue);

// Shared index structure for all spectral fields of one truncation.
//
// Coefficients are stored for one representative of each {k,-k} pair, the
// lexicographically positive one.  Representatives are ordered shell-major
// (ascending |k|^2), lexicographic within a shell.  The "full" enumeration
// interleaves each shell's complete member list in lexicographic order and
// maps every full index back to its representative slot.
class ModeTable {
 public:
  explicit ModeTable(Truncation truncation);

  const Truncation& truncation() const { return trunc_; }
  int max_eigenvalue() const { return trunc_.max_eigenvalue; }

  int rep_count() const { return static_cast<int>(reps_.size()); }
  const std::vector<WaveVector>& reps() const { return reps_; }
  const std::vector<double>& rep_norms() const { return rep_norms_; }       // |k|
  const std::vector<int>& rep_eigenvalues() const { return rep_eigs_; }     // |k|^2

  const std::vector<int>& spectrum() const { return spectrum_; }
  // Half-open representative index range of shell n; empty when n has no modes.
  std::pair<int, int> shell_range(int eigenvalue) const;

  int full_count() const { return static_cast<int>(full_.size()); }
  const std::vector<WaveVector>& full_modes() const { return full_; }
  int full_rep_index(int full_index) const { return full_rep_[full_index]; }
  bool full_is_conjugate(int full_index) const { return full_conj_[full_index] != 0; }

  // Full index of k, or -1 when k is zero or outside the truncation.
  int lookup(const WaveVector& k) const;
  // Representative slot of k together with the conjugation flag, or {-1,false}.
  std::pair<int, bool> rep_slot(const WaveVector& k) const;

  int max_component() const { return max_component_; }

  // Process-wide cache so equal truncations share one immutable table.
  static std::shared_ptr<const ModeTable> get(Truncation truncation);

 private:
  Truncation trunc_;
  std::vector<WaveVector> reps_;
  std::vector<double> rep_norms_;
  std::vector<int> rep_eigs_;
  std::vector<int> spectrum_;
  std::vector<std::pair<int, int>> shell_ranges_;  // indexed by eigenvalue (size max+1)
  std::vector<WaveVector> full_;
  std::vector<int> full_rep_;
  std::vector<char> full_conj_;
  std::vector<int> cube_;  // dense (2K+1)^3 lookup of full indices, -1 outside
  int max_component_ = 0;
};

// True when k is the stored representative of {k,-k}: first nonzero component
// positive.
bool is_representative(const WaveVector& k);

}  // namespace gevrey
