#include "gevrey/expansion.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "gevrey/bilinear.hpp"
#include "gevrey/errors.hpp"
#include "gevrey/quadrature.hpp"

namespace gevrey {

namespace {

constexpr int kMinExtractionSamples = 41;
constexpr double kMinTailRate = 0.02;

int sample_index_for(const Trajectory& traj, double t) {
  const double h = traj.sample_spacing();
  const long i = std::lround((t - traj.times.front()) / h);
  if (i < 0 || i >= traj.sample_count() || std::abs(traj.times[static_cast<size_t>(i)] - t) > 1e-9 * (1.0 + std::abs(t)))
    throw std::invalid_argument("compute_hN: t not on the stored grid");
  return static_cast<int>(i);
}

struct ImproperIntegral {
  SpectralField value;
  TailFit tail;
};

// Stored-stride quadrature of a field-valued integrand plus a fitted
// exponential tail past the horizon.  `junk_scale` is the level below which a
// non-decaying end value is attributed to rounding noise and the tail dropped.
ImproperIntegral integrate_with_tail(const std::vector<SpectralField>& g, const Trajectory& traj,
                                     double sigma_extract, double junk_scale) {
  const double h = traj.sample_spacing();
  ImproperIntegral out{trapezoid_corrected(g, h), TailFit{}};

  const GevreyParams fit_norm{0.0, sigma_extract};
  std::vector<double> norms(g.size());
  double max_norm = 0.0;
  for (size_t i = 0; i < g.size(); ++i) {
    norms[i] = gevrey_norm(g[i], fit_norm);
    max_norm = std::max(max_norm, norms[i]);
  }
  if (max_norm == 0.0) return out;

  const double t0 = traj.times.front();
  const double horizon = traj.times.back();
  const double window_start = horizon - 0.25 * (horizon - t0);
  DecayFit fit;
  try {
    fit = fit_decay_rate(traj.times, norms, window_start, horizon);
  } catch (const NumericalError&) {
    if (norms.back() <= 1e-12 * max_norm) return out;  // integrand collapsed below its own floor
    throw TailFitError("improper integral: tail fit failed on a significant integrand");
  }
  out.tail.amplitude = fit.amplitude;
  out.tail.rate = fit.rate;
  if (fit.rate <= kMinTailRate) {
    if (norms.back() <= junk_scale) return out;  // rounding-level residue
    throw TailFitError("improper integral: integrand not decaying (insufficient horizon or data not small)");
  }
  out.tail.fitted = true;
  SpectralField tail_field = g.back();
  tail_field *= exp_poly_tail_integral(0, fit.rate)[0];  // int_T^inf e^{-rate (tau-T)} = 1/rate
  out.value += tail_field;
  return out;
}

void require_extractable(const Trajectory& traj) {
  if (traj.sample_count() < kMinExtractionSamples)
    throw std::invalid_argument("extraction needs a longer stored trajectory");
}

FieldPolynomial shell_project_poly(const FieldPolynomial& poly, int eigenvalue) {
  FieldPolynomial out(poly.mode_table());
  for (int p = 0; p <= poly.degree(); ++p) out.push_coeff(shell_project(poly.coeff(p), eigenvalue));
  out.trim();
  return out;
}

FieldPolynomial apply_stokes_poly(const FieldPolynomial& poly) {
  FieldPolynomial out(poly.mode_table());
  for (int p = 0; p <= poly.degree(); ++p) out.push_coeff(apply_gevrey_multiplier(poly.coeff(p), {1.0, 0.0}));
  out.trim();
  return out;
}

SpectralField compute_hN_at(const Trajectory& traj, const ExpansionState& state, int index) {
  const int n_terms = state.depth();
  const SpectralField& u = traj.state(index);
  const double t = traj.times[static_cast<size_t>(index)];
  const SpectralField ubar = state.partial_sum(t);
  SpectralField v = u;
  v -= ubar;

  SpectralField h = bilinear(v, u);
  h += bilinear(ubar, v);
  h *= -1.0;
  for (int m = 1; m <= n_terms; ++m)
    for (int j = 1; j <= n_terms; ++j)
      if (m + j >= n_terms + 2) h -= bilinear(eval_term(state.term(m), t), eval_term(state.term(j), t));
  return h;
}

}  // namespace

void ExpansionState::append(ExpansionTerm term, TailFit tail) {
  if (term.n != depth() + 1) throw std::invalid_argument("ExpansionState: terms must be appended in order");
  terms_.push_back(std::move(term));
  tail_models_.push_back(tail);
}

SpectralField ExpansionState::partial_sum(double t, int count) const {
  const auto table = source_->states.front().mode_table();
  SpectralField sum(table);
  sum.mark_solenoidal(true);
  const int n_terms = count < 0 ? depth() : count;
  for (int n = 1; n <= n_terms; ++n) sum += eval_term(term(n), t);
  return sum;
}

ExpansionState ExpansionState::perturbed(int n, int coeff_index, double factor) const {
  SpectralField value = term(n).q.coeff(coeff_index);
  value *= factor;
  return with_coefficient(n, coeff_index, std::move(value));
}

ExpansionState ExpansionState::with_coefficient(int n, int coeff_index, SpectralField value) const {
  ExpansionState copy = *this;
  const FieldPolynomial& q = copy.term(n).q;
  if (coeff_index < 0 || coeff_index > q.degree())
    throw std::invalid_argument("ExpansionState: coefficient index out of range");
  std::vector<SpectralField> coeffs = q.coeffs();
  coeffs[static_cast<size_t>(coeff_index)] = std::move(value);
  copy.terms_[static_cast<size_t>(n) - 1].q = FieldPolynomial(q.mode_table(), std::move(coeffs));
  return copy;
}

std::vector<int> ExpansionState::shell_support(int n) const {
  const FieldPolynomial& q = term(n).q;
  std::vector<int> shells;
  if (q.is_zero()) return shells;
  const ModeTable& table = *q.mode_table();
  for (int eig : table.spectrum()) {
    bool hit = false;
    for (int p = 0; p <= q.degree() && !hit; ++p)
      hit = !shell_project(q.coeff(p), eig).is_zero();
    if (hit) shells.push_back(eig);
  }
  return shells;
}

double ExpansionState::resonant_norm(int n) const {
  const FieldPolynomial& q = term(n).q;
  if (q.is_zero()) return 0.0;
  return l2_norm(shell_project(q.evaluate(0.0), n));
}

ExpansionTerm extract_q1(const Trajectory& traj, double sigma_extract, TailFit* tail_out) {
  require_extractable(traj);
  std::vector<SpectralField> integrand;
  integrand.reserve(traj.states.size());
  for (int i = 0; i < traj.sample_count(); ++i) {
    SpectralField g = shell_project(bilinear(traj.state(i), traj.state(i)), 1);
    g *= std::exp(traj.times[static_cast<size_t>(i)]);
    integrand.push_back(std::move(g));
  }
  const double scale = l2_norm(traj.state(0));
  const auto improper = integrate_with_tail(integrand, traj, sigma_extract, 1e-9 * scale * scale);
  if (tail_out) *tail_out = improper.tail;

  SpectralField xi = shell_project(traj.state(0), 1);
  xi *= std::exp(traj.times.front());
  xi -= improper.value;
  return ExpansionTerm{1, FieldPolynomial::constant(std::move(xi))};
}

SpectralField compute_hN(const Trajectory& traj, const ExpansionState& state, double t) {
  return compute_hN_at(traj, state, sample_index_for(traj, t));
}

ExpansionTerm extract_next_term(const Trajectory& traj, const ExpansionState& state, TailFit* tail_out) {
  require_extractable(traj);
  const int n_terms = state.depth();
  if (n_terms < 1) throw std::invalid_argument("extract_next_term: extract_q1 first");
  const int target = n_terms + 1;
  const auto table = traj.states.front().mode_table();

  FieldPolynomial products(table);
  for (int m = 1; m <= n_terms; ++m) {
    const int j = target - m;
    if (j >= 1 && j <= n_terms) products += bilinear_poly(state.term(m).q, state.term(j).q);
  }

  // Resonant constant on shell N+1 from the trajectory.
  SpectralField xi(table);
  xi.mark_solenoidal(true);
  TailFit tail{};
  const bool resonant_shell_present =
      target <= table->max_eigenvalue() && table->shell_range(target).second > table->shell_range(target).first;
  if (resonant_shell_present) {
    std::vector<SpectralField> integrand;
    integrand.reserve(traj.states.size());
    for (int i = 0; i < traj.sample_count(); ++i) {
      SpectralField g = shell_project(compute_hN_at(traj, state, i), target);
      g *= std::exp(static_cast<double>(target) * traj.times[static_cast<size_t>(i)]);
      integrand.push_back(std::move(g));
    }
    const double scale = l2_norm(traj.state(0));
    const auto improper = integrate_with_tail(integrand, traj, state.sigma_extract(), 1e-9 * scale * scale);
    tail = improper.tail;

    SpectralField v0 = traj.state(0);
    v0 -= state.partial_sum(traj.times.front());
    xi = shell_project(v0, target);
    xi *= std::exp(static_cast<double>(target) * traj.times.front());
    xi += improper.value;
  }
  if (tail_out) *tail_out = tail;

  FieldPolynomial q(table);
  for (int eig : table->spectrum()) {
    FieldPolynomial rhs = shell_project_poly(products, eig);
    rhs *= -1.0;
    if (eig == target) {
      q += solve_poly_ode(0.0, rhs, xi);
    } else if (!rhs.is_zero()) {
      q += solve_poly_ode(static_cast<double>(eig - target), rhs);
    }
  }
  return ExpansionTerm{target, std::move(q)};
}

ExpansionState extract_terms(std::shared_ptr<const Trajectory> traj, int depth, double sigma_extract) {
  if (depth < 1) throw std::invalid_argument("extract_terms: depth must be >= 1");
  ExpansionState state(traj, sigma_extract);
  for (int n = 1; n <= depth; ++n) {
    TailFit tail{};
    ExpansionTerm term =
        n == 1 ? extract_q1(*traj, sigma_extract, &tail) : extract_next_term(*traj, state, &tail);
    state.append(std::move(term), tail);
  }
  return state;
}

std::vector<double> remainder_series(const Trajectory& traj, const ExpansionState& state, int n_terms,
                                     const GevreyParams& p) {
  if (n_terms < 0 || n_terms > state.depth())
    throw std::invalid_argument("remainder_series: n_terms out of range");
  std::vector<double> series(traj.states.size());
  for (int i = 0; i < traj.sample_count(); ++i) {
    SpectralField v = traj.state(i);
    v -= state.partial_sum(traj.times[static_cast<size_t>(i)], n_terms);
    series[static_cast<size_t>(i)] = gevrey_norm(v, p);
  }
  return series;
}

double ode_residual(const ExpansionState& state, int n, const std::vector<double>& t_samples) {
  if (n < 1 || n > state.depth()) throw std::invalid_argument("ode_residual: term index out of range");
  if (t_samples.empty()) throw std::invalid_argument("ode_residual: need sample points");
  const FieldPolynomial& q = state.term(n).q;

  FieldPolynomial residual = q.derivative();
  residual += apply_stokes_poly(q);
  FieldPolynomial damped = q;
  damped *= -static_cast<double>(n);
  residual += damped;
  for (int m = 1; m < n; ++m) residual += bilinear_poly(state.term(m).q, state.term(n - m).q);

  double num = 0.0, denom = 0.0;
  for (double t : t_samples) {
    num = std::max(num, l2_norm(residual.evaluate(t)));
    denom = std::max(denom, l2_norm(q.evaluate(t)));
  }
  return denom > 0.0 ? num / denom : num;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open manifest " + file.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.empty()) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace

void save_expansion(const ExpansionState& state, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.txt", std::ios::trunc);
  if (!manifest) throw std::runtime_error("save_expansion: cannot write manifest in " + dir.string());
  manifest << "format=expansion.v1\n";
  manifest << "lambda=" << state.source().config.truncation.max_eigenvalue << "\n";
  manifest << "sigma_extract=" << format_double(state.sigma_extract()) << "\n";
  manifest << "depth=" << state.depth() << "\n";
  for (int n = 1; n <= state.depth(); ++n) {
    const auto& term = state.term(n);
    const auto& tail = state.tail_models()[static_cast<size_t>(n) - 1];
    manifest << "term" << n << "_degree=" << term.q.degree() << "\n";
    manifest << "term" << n << "_tail_amplitude=" << format_double(tail.amplitude) << "\n";
    manifest << "term" << n << "_tail_rate=" << format_double(tail.rate) << "\n";
    manifest << "term" << n << "_tail_fitted=" << (tail.fitted ? 1 : 0) << "\n";
    const auto term_dir = dir / ("term_" + std::to_string(n));
    std::filesystem::create_directories(term_dir);
    for (int p = 0; p <= term.q.degree(); ++p)
      save_snapshot(term.q.coeff(p), term_dir / ("coeff_" + std::to_string(p) + ".bin"));
  }

  std::ofstream summary(dir / "summary.txt", std::ios::trunc);
  summary << "asymptotic expansion u(t) ~ sum_n q_n(t) e^{-n t}\n";
  summary << "terms: " << state.depth() << ", sigma_extract: " << format_double(state.sigma_extract()) << "\n";
  for (int n = 1; n <= state.depth(); ++n) {
    summary << "q_" << n << ": degree " << state.term(n).q.degree() << ", shells [";
    const auto shells = state.shell_support(n);
    for (size_t s = 0; s < shells.size(); ++s) summary << (s ? " " : "") << shells[s];
    summary << "], |xi_" << n << "| = " << format_double(state.resonant_norm(n));
    const auto& tail = state.tail_models()[static_cast<size_t>(n) - 1];
    if (tail.fitted)
      summary << ", tail rate " << format_double(tail.rate);
    else
      summary << ", tail none";
    summary << "\n";
  }
}

ExpansionState load_expansion(const std::filesystem::path& dir, std::shared_ptr<const Trajectory> source) {
  const auto kv = read_manifest(dir / "manifest.txt");
  if (std::stoi(kv.at("lambda")) != source->config.truncation.max_eigenvalue)
    throw std::runtime_error("load_expansion: truncation mismatch with source trajectory");
  ExpansionState state(source, std::stod(kv.at("sigma_extract")));
  const int depth = std::stoi(kv.at("depth"));
  const auto table = source->states.front().mode_table();
  for (int n = 1; n <= depth; ++n) {
    const int degree = std::stoi(kv.at("term" + std::to_string(n) + "_degree"));
    FieldPolynomial q(table);
    for (int p = 0; p <= degree; ++p)
      q.push_coeff(load_snapshot(dir / ("term_" + std::to_string(n)) / ("coeff_" + std::to_string(p) + ".bin")));
    TailFit tail;
    tail.amplitude = std::stod(kv.at("term" + std::to_string(n) + "_tail_amplitude"));
    tail.rate = std::stod(kv.at("term" + std::to_string(n) + "_tail_rate"));
    tail.fitted = std::stoi(kv.at("term" + std::to_string(n) + "_tail_fitted")) != 0;
    state.append(ExpansionTerm{n, std::move(q)}, tail);
  }
  return state;
}

}  // namespace gevrey
