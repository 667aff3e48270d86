#include "gevrey/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gevrey {

namespace {

bool lex_less(const WaveVector& a, const WaveVector& b) {
  if (a[0] != b[0]) return a[0] < b[0];
  if (a[1] != b[1]) return a[1] < b[1];
  return a[2] < b[2];
}

}  // namespace

bool is_representative(const WaveVector& k) {
  if (k[0] != 0) return k[0] > 0;
  if (k[1] != 0) return k[1] > 0;
  return k[2] > 0;
}

Shell enumerate_shell(int eigenvalue) {
  if (eigenvalue < 1) throw std::invalid_argument("enumerate_shell: eigenvalue must be >= 1");
  Shell shell;
  shell.eigenvalue = eigenvalue;
  const int bound = static_cast<int>(std::floor(std::sqrt(static_cast<double>(eigenvalue)))) + 1;
  for (int i = -bound; i <= bound; ++i)
    for (int j = -bound; j <= bound; ++j)
      for (int l = -bound; l <= bound; ++l)
        if (i * i + j * j + l * l == eigenvalue) shell.members.emplace_back(i, j, l);
  std::sort(shell.members.begin(), shell.members.end(), lex_less);
  return shell;
}

std::vector<int> stokes_spectrum(int max_eigenvalue) {
  if (max_eigenvalue < 1) throw std::invalid_argument("stokes_spectrum: max_eigenvalue must be >= 1");
  std::vector<int> spectrum;
  for (int n = 1; n <= max_eigenvalue; ++n)
    if (!enumerate_shell(n).members.empty()) spectrum.push_back(n);
  return spectrum;
}

ModeTable::ModeTable(Truncation truncation) : trunc_(truncation) {
  const int lambda = trunc_.max_eigenvalue;
  if (lambda < 1) throw std::invalid_argument("ModeTable: max_eigenvalue must be >= 1");
  shell_ranges_.assign(lambda + 1, {0, 0});
  for (int n = 1; n <= lambda; ++n) {
    Shell shell = enumerate_shell(n);
    if (shell.members.empty()) {
      shell_ranges_[n] = {rep_count(), rep_count()};
      continue;
    }
    spectrum_.push_back(n);
    const int begin = rep_count();
    for (const WaveVector& k : shell.members) {
      full_.push_back(k);
      if (is_representative(k)) {
        reps_.push_back(k);
        rep_eigs_.push_back(n);
        rep_norms_.push_back(std::sqrt(static_cast<double>(n)));
        max_component_ = std::max({max_component_, std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
      }
    }
    shell_ranges_[n] = {begin, rep_count()};
  }

  // Dense cube lookup and full->rep back-references.
  const int K = max_component_;
  const int side = 2 * K + 1;
  cube_.assign(static_cast<size_t>(side) * side * side, -1);
  auto cube_index = [K, side](const WaveVector& k) {
    return ((k[0] + K) * side + (k[1] + K)) * side + (k[2] + K);
  };
  for (int fi = 0; fi < full_count(); ++fi) cube_[cube_index(full_[fi])] = fi;

  full_rep_.resize(full_count());
  full_conj_.resize(full_count());
  for (int fi = 0; fi < full_count(); ++fi) {
    const WaveVector& k = full_[fi];
    const bool conj = !is_representative(k);
    const WaveVector rep = conj ? WaveVector(-k) : k;
    const auto [begin, end] = shell_ranges_[k.squaredNorm()];
    int slot = -1;
    for (int ri = begin; ri < end; ++ri)
      if (reps_[ri] == rep) {
        slot = ri;
        break;
      }
    full_rep_[fi] = slot;
    full_conj_[fi] = conj ? 1 : 0;
  }
}

std::pair<int, int> ModeTable::shell_range(int eigenvalue) const {
  if (eigenvalue < 1 || eigenvalue > trunc_.max_eigenvalue) return {0, 0};
  return shell_ranges_[eigenvalue];
}

int ModeTable::lookup(const WaveVector& k) const {
  const int K = max_component_;
  if (std::abs(k[0]) > K || std::abs(k[1]) > K || std::abs(k[2]) > K) return -1;
  const int side = 2 * K + 1;
  return cube_[((k[0] + K) * side + (k[1] + K)) * side + (k[2] + K)];
}

std::pair<int, bool> ModeTable::rep_slot(const WaveVector& k) const {
  const int fi = lookup(k);
  if (fi < 0) return {-1, false};
  return {full_rep_[fi], full_is_conjugate(fi)};
}

std::shared_ptr<const ModeTable> ModeTable::get(Truncation truncation) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const ModeTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(truncation.max_eigenvalue);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<const ModeTable>(truncation);
  cache.emplace(truncation.max_eigenvalue, table);
  return table;
}

}  // namespace gevrey
