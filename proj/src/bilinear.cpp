#include "gevrey/bilinear.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gevrey/errors.hpp"

namespace gevrey {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::atomic<int> g_thread_count{1};

void parallel_for(int n, const std::function<void(int)>& body) {
  const int threads = std::min(g_thread_count.load(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

// Full-lattice amplitudes (representatives followed by implied conjugates in
// the table's full ordering).
CoeffMatrix expand_full(const SpectralField& u) {
  const ModeTable& table = u.modes();
  CoeffMatrix full(3, table.full_count());
  for (int fi = 0; fi < table.full_count(); ++fi) {
    const int ri = table.full_rep_index(fi);
    if (table.full_is_conjugate(fi))
      full.col(fi) = u.coeffs().col(ri).conjugate();
    else
      full.col(fi) = u.coeffs().col(ri);
  }
  return full;
}

void require_bilinear_inputs(const SpectralField& u, const SpectralField& v) {
  require_same_truncation(u, v);
  if (!u.solenoidal() || !v.solenoidal())
    throw std::invalid_argument("bilinear: inputs must be solenoidal");
}

}  // namespace

void set_bilinear_threads(int threads) { g_thread_count.store(std::max(1, threads)); }

SpectralField bilinear(const SpectralField& u, const SpectralField& v) {
  require_bilinear_inputs(u, v);
  const ModeTable& table = u.modes();
  const CoeffMatrix u_full = expand_full(u);
  const CoeffMatrix v_full = expand_full(v);
  const auto& full_modes = table.full_modes();
  const Complex i_unit(0.0, 1.0);

  SpectralField out(u.mode_table());
  // Reality is automatic: the sum for -k is the conjugate of the sum for k,
  // so only representative outputs are accumulated.
  parallel_for(table.rep_count(), [&](int oi) {
    const WaveVector k = table.reps()[oi];
    Amplitude acc = Amplitude::Zero();
    for (int pi = 0; pi < table.full_count(); ++pi) {
      const WaveVector q = k - full_modes[pi];
      const int qi = table.lookup(q);
      if (qi < 0) continue;
      const Complex u_dot_q = static_cast<Real>(q[0]) * u_full(0, pi) +
                              static_cast<Real>(q[1]) * u_full(1, pi) +
                              static_cast<Real>(q[2]) * u_full(2, pi);
      acc += (i_unit * u_dot_q) * v_full.col(qi);
    }
    out.coeffs().col(oi) = acc;
  });
  return leray_project(out);
}

SpectralField bilinear_oracle(const SpectralField& u, const SpectralField& v) {
  require_bilinear_inputs(u, v);
  const ModeTable& table = u.modes();
  // (2M+1) points per axis with 2M+1 > 3K give exact quadrature for the
  // product of trigonometric polynomials of per-axis degree <= K.
  const int K = table.max_component();
  int grid = 3 * K + 1;
  if (grid % 2 == 0) ++grid;
  const int npts = grid * grid * grid;

  std::vector<Complex> roots(grid);
  for (int m = 0; m < grid; ++m)
    roots[m] = std::polar(1.0, 2.0 * kPi * static_cast<double>(m) / static_cast<double>(grid));
  auto phase = [&](const WaveVector& k, int jx, int jy, int jz) {
    int m = (k[0] * jx + k[1] * jy + k[2] * jz) % grid;
    if (m < 0) m += grid;
    return roots[m];
  };

  // u and grad v sampled on the grid; fields are real so the conjugate half
  // contributes twice the real part.
  using RealVec3 = Eigen::Matrix<Real, 3, 1>;
  using RealMat3 = Eigen::Matrix<Real, 3, 3>;
  std::vector<RealVec3> u_phys(npts, RealVec3::Zero());
  std::vector<RealMat3> gradv_phys(npts, RealMat3::Zero());  // (j, comp) = d_j v_comp
  int flat = 0;
  for (int jx = 0; jx < grid; ++jx)
    for (int jy = 0; jy < grid; ++jy)
      for (int jz = 0; jz < grid; ++jz, ++flat) {
        RealVec3 uval = RealVec3::Zero();
        RealMat3 gval = RealMat3::Zero();
        for (int ri = 0; ri < table.rep_count(); ++ri) {
          const WaveVector& k = table.reps()[ri];
          const Complex ph = phase(k, jx, jy, jz);
          const Amplitude uc = u.coeffs().col(ri) * ph;
          uval += 2.0 * uc.real();
          const Amplitude vc = v.coeffs().col(ri) * ph;
          for (int j = 0; j < 3; ++j) {
            // d_j of v_comp e^{ik.x} pulls down i k_j.
            const Amplitude dv = Complex(0.0, static_cast<Real>(k[j])) * vc;
            gval.row(j) += 2.0 * dv.real().transpose();
          }
        }
        u_phys[flat] = uval;
        gradv_phys[flat] = gval;
      }

  std::vector<RealVec3> w_phys(npts);
  for (int p = 0; p < npts; ++p) w_phys[p] = gradv_phys[p].transpose() * u_phys[p];

  SpectralField out(u.mode_table());
  for (int ri = 0; ri < table.rep_count(); ++ri) {
    const WaveVector& k = table.reps()[ri];
    Amplitude acc = Amplitude::Zero();
    flat = 0;
    for (int jx = 0; jx < grid; ++jx)
      for (int jy = 0; jy < grid; ++jy)
        for (int jz = 0; jz < grid; ++jz, ++flat) {
          const Complex ph = std::conj(phase(k, jx, jy, jz));
          acc += w_phys[flat].cast<Complex>() * ph;
        }
    out.coeffs().col(ri) = acc / static_cast<Real>(npts);
  }
  return leray_project(out);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 step on the combined value.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BilinearRatioReport probe_inequalities(Truncation truncation, double alpha, double sigma, int samples,
                                       std::uint64_t seed) {
  if (alpha < 0.0 || sigma < 0.0) throw std::invalid_argument("probe_inequalities: alpha, sigma must be >= 0");
  if (samples < 1) throw std::invalid_argument("probe_inequalities: samples must be >= 1");
  auto table = ModeTable::get(truncation);

  BilinearRatioReport report;
  report.alpha = alpha;
  report.sigma = sigma;
  report.samples = samples;
  report.seed = seed;
  report.aalphab_valid = alpha >= 0.5;

  const double four_alpha = std::pow(4.0, alpha);
  for (int s = 0; s < samples; ++s) {
    const SpectralField u = random_solenoidal_field(table, derive_seed(seed, 2 * s), 1.0);
    const SpectralField v = random_solenoidal_field(table, derive_seed(seed, 2 * s + 1), 1.0);
    if (u.is_zero() || v.is_zero()) continue;
    const SpectralField b = bilinear(u, v);
    const double lhs = gevrey_norm(b, {alpha, sigma});

    const double u_half = gevrey_norm(u, {0.5, sigma});
    const double u_one = gevrey_norm(u, {1.0, sigma});
    const double v_ap_half = gevrey_norm(v, {alpha + 0.5, sigma});
    const double common = std::sqrt(u_half) * std::sqrt(u_one) * v_ap_half;
    const double den1 = four_alpha * (common + gevrey_norm(u, {alpha + 0.25, sigma}) * gevrey_norm(v, {1.0, sigma}));
    const double den2 =
        four_alpha * (common + gevrey_norm(u, {alpha + 0.5, sigma}) * gevrey_norm(v, {0.75, sigma}));
    report.max_ratio_b1 = std::max(report.max_ratio_b1, lhs / den1);
    report.max_ratio_b2 = std::max(report.max_ratio_b2, lhs / den2);
    if (report.aalphab_valid) {
      const double den_a = gevrey_norm(u, {alpha + 0.5, sigma}) * v_ap_half;
      report.max_ratio_aalphab = std::max(report.max_ratio_aalphab, lhs / den_a);
    }
    ++report.used_samples;
  }
  return report;
}

double estimate_bilinear_constant(Truncation truncation, double sigma, int samples, std::uint64_t seed) {
  const double alphas[] = {0.5, 1.0, 2.0, 4.0};
  double ratios[4];
  for (int i = 0; i < 4; ++i)
    ratios[i] = probe_inequalities(truncation, alphas[i], sigma, samples, seed).max_ratio_aalphab;

  double base = 1.0;
  for (int i = 0; i < 4; ++i)
    if (ratios[i] > 0.0) base = std::max(base, std::pow(ratios[i], 1.0 / alphas[i]));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (ratios[i] > 0.0 && ratios[j] > 0.0)
        base = std::max(base, std::pow(ratios[j] / ratios[i], 1.0 / (alphas[j] - alphas[i])));
  return base;
}

}  // namespace gevrey
