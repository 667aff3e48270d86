#include "gevrey/field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "gevrey/errors.hpp"

namespace gevrey {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBoxVolume = 8.0 * kPi * kPi * kPi;  // |(-pi,pi)^3|

static_assert(std::endian::native == std::endian::little, "snapshot format assumes little-endian");

// Deterministic Gaussian source; avoids std::normal_distribution so streams
// do not depend on the standard library implementation.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : gen_(seed) {}

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53; }  // (0,1]
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

void require_valid(const GevreyParams& p) {
  if (p.alpha < 0.0 || p.sigma < 0.0)
    throw std::invalid_argument("GevreyParams: alpha and sigma must be nonnegative");
}

}  // namespace

SpectralField::SpectralField(std::shared_ptr<const ModeTable> modes) : modes_(std::move(modes)) {
  coeffs_ = CoeffMatrix::Zero(3, modes_->rep_count());
}

Amplitude SpectralField::coeff(const WaveVector& k) const {
  const auto [slot, conj] = modes_->rep_slot(k);
  if (slot < 0) return Amplitude::Zero();
  if (conj) return coeffs_.col(slot).conjugate();
  return coeffs_.col(slot);
}

void SpectralField::set_coeff(const WaveVector& k, const Amplitude& value) {
  const auto [slot, conj] = modes_->rep_slot(k);
  if (slot < 0) throw std::invalid_argument("set_coeff: wavevector outside truncation");
  coeffs_.col(slot) = conj ? value.conjugate() : value;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_truncation(*this, other);
  coeffs_ += other.coeffs_;
  solenoidal_ = solenoidal_ && other.solenoidal_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_truncation(*this, other);
  coeffs_ -= other.coeffs_;
  solenoidal_ = solenoidal_ && other.solenoidal_;
  return *this;
}

SpectralField& SpectralField::operator*=(double scalar) {
  coeffs_ *= scalar;
  return *this;
}

void require_same_truncation(const SpectralField& u, const SpectralField& v) {
  if (u.modes().truncation().max_eigenvalue != v.modes().truncation().max_eigenvalue)
    throw std::invalid_argument("truncation mismatch");
}

SpectralField leray_project(const SpectralField& f) {
  SpectralField out = f;
  const ModeTable& table = f.modes();
  auto& c = out.coeffs();
  for (int i = 0; i < table.rep_count(); ++i) {
    const Eigen::Matrix<Real, 3, 1> kd = table.reps()[i].cast<Real>();
    const Complex k_dot_u = kd[0] * c(0, i) + kd[1] * c(1, i) + kd[2] * c(2, i);
    c.col(i) -= (k_dot_u / static_cast<Real>(table.rep_eigenvalues()[i])) * kd.template cast<Complex>();
  }
  out.mark_solenoidal(true);
  return out;
}

SpectralField apply_gevrey_multiplier(const SpectralField& u, const GevreyParams& p) {
  require_valid(p);
  SpectralField out = u;
  const ModeTable& table = u.modes();
  for (int n : table.spectrum()) {
    const auto [begin, end] = table.shell_range(n);
    const Real w = std::pow(static_cast<Real>(n), p.alpha) * std::exp(p.sigma * std::sqrt(static_cast<Real>(n)));
    out.coeffs().middleCols(begin, end - begin) *= w;
  }
  return out;
}

SpectralField apply_smoothing(const SpectralField& u, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("apply_smoothing: alpha must be nonnegative");
  SpectralField out = u;
  const ModeTable& table = u.modes();
  for (int n : table.spectrum()) {
    const auto [begin, end] = table.shell_range(n);
    const Real root = std::sqrt(static_cast<Real>(n));
    const Real w = std::pow(static_cast<Real>(n), alpha) * std::exp(-root);
    out.coeffs().middleCols(begin, end - begin) *= w;
  }
  return out;
}

double gevrey_norm(const SpectralField& u, const GevreyParams& p) {
  require_valid(p);
  const ModeTable& table = u.modes();
  double sum = 0.0;
  for (int n : table.spectrum()) {
    const auto [begin, end] = table.shell_range(n);
    const Real w =
        std::pow(static_cast<Real>(n), 2.0 * p.alpha) * std::exp(2.0 * p.sigma * std::sqrt(static_cast<Real>(n)));
    sum += w * u.coeffs().middleCols(begin, end - begin).squaredNorm();
  }
  return std::sqrt(kBoxVolume * 2.0 * sum);
}

double l2_norm(const SpectralField& u) { return gevrey_norm(u, {0.0, 0.0}); }

double dirichlet_norm(const SpectralField& u) { return gevrey_norm(u, {0.5, 0.0}); }

SpectralField shell_project(const SpectralField& u, int eigenvalue) {
  if (eigenvalue < 1) throw std::invalid_argument("shell_project: eigenvalue must be >= 1");
  SpectralField out(u.mode_table());
  const auto [begin, end] = u.modes().shell_range(eigenvalue);
  if (end > begin) out.coeffs().middleCols(begin, end - begin) = u.coeffs().middleCols(begin, end - begin);
  out.mark_solenoidal(u.solenoidal());
  return out;
}

SpectralField low_pass_project(const SpectralField& u, int eigenvalue) {
  SpectralField out(u.mode_table());
  for (int n : u.modes().spectrum()) {
    if (n > eigenvalue) break;
    const auto [begin, end] = u.modes().shell_range(n);
    out.coeffs().middleCols(begin, end - begin) = u.coeffs().middleCols(begin, end - begin);
  }
  out.mark_solenoidal(u.solenoidal());
  return out;
}

double inner_product(const SpectralField& u, const SpectralField& v) {
  require_same_truncation(u, v);
  const Complex s = u.coeffs().cwiseProduct(v.coeffs().conjugate()).sum();
  return kBoxVolume * 2.0 * s.real();
}

bool divergence_free_within(const SpectralField& u, double rel_tol) {
  const ModeTable& table = u.modes();
  double worst = 0.0;
  double scale = 0.0;
  for (int i = 0; i < table.rep_count(); ++i) {
    const Amplitude c = u.coeffs().col(i);
    const Eigen::Matrix<Real, 3, 1> kd = table.reps()[i].cast<Real>();
    const Complex k_dot_u = kd[0] * c[0] + kd[1] * c[1] + kd[2] * c[2];
    worst = std::max(worst, std::abs(k_dot_u));
    scale = std::max(scale, kd.norm() * c.norm());
  }
  return worst <= rel_tol * scale;
}

SpectralField single_mode_field(std::shared_ptr<const ModeTable> modes, const WaveVector& k, double amplitude) {
  SpectralField u(std::move(modes));
  if (k == WaveVector::Zero()) throw std::invalid_argument("single_mode_field: zero wavevector");
  auto cross = [](const WaveVector& x, const WaveVector& y) {
    return WaveVector(x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]);
  };
  WaveVector a = cross(k, WaveVector(0, 0, 1));
  if (a == WaveVector::Zero()) a = cross(k, WaveVector(1, 0, 0));
  const Eigen::Matrix<Real, 3, 1> unit = a.cast<Real>().normalized();
  u.set_coeff(k, amplitude * unit.cast<Complex>());
  u.mark_solenoidal(true);
  return u;
}

SpectralField beltrami_abc_field(std::shared_ptr<const ModeTable> modes, double a, double b, double c) {
  SpectralField u(std::move(modes));
  const Complex i(0.0, 1.0);
  // (A sin x3 + C cos x2, B sin x1 + A cos x3, C sin x2 + B cos x1)
  u.set_coeff(WaveVector(0, 0, 1), Amplitude(-0.5 * i * a, 0.5 * a, 0.0));
  u.set_coeff(WaveVector(1, 0, 0), Amplitude(0.0, -0.5 * i * b, 0.5 * b));
  u.set_coeff(WaveVector(0, 1, 0), Amplitude(0.5 * c, 0.0, -0.5 * i * c));
  u.mark_solenoidal(true);
  return u;
}

SpectralField random_solenoidal_field(std::shared_ptr<const ModeTable> modes, std::uint64_t seed, double decay) {
  SpectralField u(std::move(modes));
  GaussianSource rng(seed);
  const ModeTable& table = u.modes();
  for (int idx = 0; idx < table.rep_count(); ++idx) {
    const double envelope = std::exp(-decay * table.rep_norms()[idx]);
    for (int comp = 0; comp < 3; ++comp)
      u.coeffs()(comp, idx) = envelope * Complex(rng.normal(), rng.normal());
  }
  return leray_project(u);
}

SpectralField random_small_field(std::shared_ptr<const ModeTable> modes, std::uint64_t seed, double amplitude,
                                 double decay) {
  if (amplitude <= 0.0) throw std::invalid_argument("random_small_field: amplitude must be positive");
  SpectralField u = random_solenoidal_field(std::move(modes), seed, decay);
  const double norm = dirichlet_norm(u);
  if (norm == 0.0) throw NumericalError("random_small_field: degenerate draw");
  u *= amplitude / norm;
  return u;
}

namespace {

struct SnapshotHeader {
  char magic[4];
  std::uint32_t version;
  std::uint32_t max_eigenvalue;
  std::uint32_t shell_count;
};

constexpr char kMagic[4] = {'G', 'V', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_snapshot(const SpectralField& u, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_snapshot: cannot open " + file.string());
  const ModeTable& table = u.modes();
  SnapshotHeader header{};
  std::memcpy(header.magic, kMagic, 4);
  header.version = kVersion;
  header.max_eigenvalue = static_cast<std::uint32_t>(table.max_eigenvalue());
  header.shell_count = static_cast<std::uint32_t>(table.spectrum().size());
  out.write(reinterpret_cast<const char*>(&header), sizeof(header));
  for (int idx = 0; idx < table.rep_count(); ++idx) {
    const WaveVector& k = table.reps()[idx];
    std::int32_t kv[3] = {k[0], k[1], k[2]};
    out.write(reinterpret_cast<const char*>(kv), sizeof(kv));
    double amp[6];
    for (int comp = 0; comp < 3; ++comp) {
      amp[2 * comp] = u.coeffs()(comp, idx).real();
      amp[2 * comp + 1] = u.coeffs()(comp, idx).imag();
    }
    out.write(reinterpret_cast<const char*>(amp), sizeof(amp));
  }
  if (!out) throw std::runtime_error("save_snapshot: write failed for " + file.string());
}

SpectralField load_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("load_snapshot: cannot open " + file.string());
  SnapshotHeader header{};
  in.read(reinterpret_cast<char*>(&header), sizeof(header));
  if (!in || std::memcmp(header.magic, kMagic, 4) != 0)
    throw std::runtime_error("load_snapshot: bad magic in " + file.string());
  if (header.version != kVersion) throw std::runtime_error("load_snapshot: unsupported version");
  auto table = ModeTable::get({static_cast<int>(header.max_eigenvalue)});
  if (header.shell_count != table->spectrum().size())
    throw std::runtime_error("load_snapshot: shell count mismatch in " + file.string());
  SpectralField u(table);
  for (int idx = 0; idx < table->rep_count(); ++idx) {
    std::int32_t kv[3];
    double amp[6];
    in.read(reinterpret_cast<char*>(kv), sizeof(kv));
    in.read(reinterpret_cast<char*>(amp), sizeof(amp));
    if (!in) throw std::runtime_error("load_snapshot: truncated file " + file.string());
    const WaveVector& k = table->reps()[idx];
    if (kv[0] != k[0] || kv[1] != k[1] || kv[2] != k[2])
      throw std::runtime_error("load_snapshot: mode order mismatch in " + file.string());
    for (int comp = 0; comp < 3; ++comp)
      u.coeffs()(comp, idx) = Complex(amp[2 * comp], amp[2 * comp + 1]);
  }
  u.mark_solenoidal(divergence_free_within(u, 1e-12));
  return u;
}

}  // namespace gevrey
