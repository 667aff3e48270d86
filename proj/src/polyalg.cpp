#include "gevrey/polyalg.hpp"

#include <cmath>
#include <stdexcept>

#include "gevrey/bilinear.hpp"

namespace gevrey {

FieldPolynomial::FieldPolynomial(std::shared_ptr<const ModeTable> modes, std::vector<SpectralField> coeffs)
    : modes_(std::move(modes)), coeffs_(std::move(coeffs)) {
  for (const SpectralField& c : coeffs_)
    if (c.modes().truncation().max_eigenvalue != modes_->truncation().max_eigenvalue)
      throw std::invalid_argument("FieldPolynomial: truncation mismatch");
  trim();
}

FieldPolynomial FieldPolynomial::constant(SpectralField c) {
  FieldPolynomial p(c.mode_table());
  p.push_coeff(std::move(c));
  p.trim();
  return p;
}

void FieldPolynomial::push_coeff(SpectralField c) {
  if (c.modes().truncation().max_eigenvalue != modes_->truncation().max_eigenvalue)
    throw std::invalid_argument("FieldPolynomial: truncation mismatch");
  coeffs_.push_back(std::move(c));
}

void FieldPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

SpectralField FieldPolynomial::evaluate(double t) const {
  if (coeffs_.empty()) {
    SpectralField zero(modes_);
    zero.mark_solenoidal(true);
    return zero;
  }
  SpectralField acc = coeffs_.back();
  for (int p = degree() - 1; p >= 0; --p) {
    acc *= t;
    acc += coeffs_[p];
  }
  return acc;
}

FieldPolynomial FieldPolynomial::derivative() const {
  FieldPolynomial out(modes_);
  for (int p = 1; p <= degree(); ++p) {
    SpectralField c = coeffs_[p];
    c *= static_cast<double>(p);
    out.push_coeff(std::move(c));
  }
  out.trim();
  return out;
}

FieldPolynomial FieldPolynomial::antiderivative() const {
  FieldPolynomial out(modes_);
  if (is_zero()) return out;
  SpectralField zero(modes_);
  zero.mark_solenoidal(true);
  out.push_coeff(std::move(zero));
  for (int p = 0; p <= degree(); ++p) {
    SpectralField c = coeffs_[p];
    c *= 1.0 / static_cast<double>(p + 1);
    out.push_coeff(std::move(c));
  }
  out.trim();
  return out;
}

FieldPolynomial& FieldPolynomial::operator+=(const FieldPolynomial& other) {
  if (other.modes_->truncation().max_eigenvalue != modes_->truncation().max_eigenvalue)
    throw std::invalid_argument("FieldPolynomial: truncation mismatch");
  const int n = std::max(degree(), other.degree());
  for (int p = 0; p <= n; ++p) {
    if (p > degree()) {
      coeffs_.push_back(other.coeffs_[p]);
    } else if (p <= other.degree()) {
      coeffs_[p] += other.coeffs_[p];
    }
  }
  trim();
  return *this;
}

FieldPolynomial& FieldPolynomial::operator*=(double s) {
  for (SpectralField& c : coeffs_) c *= s;
  return *this;
}

FieldPolynomial solve_poly_ode(double lambda, const FieldPolynomial& rhs,
                               const std::optional<SpectralField>& resonant_value) {
  if (lambda == 0.0) {
    if (!resonant_value.has_value())
      throw std::invalid_argument("solve_poly_ode: lambda == 0 requires the value p(0)");
    FieldPolynomial p = rhs.antiderivative();
    p += FieldPolynomial::constant(*resonant_value);
    return p;
  }
  if (resonant_value.has_value())
    throw std::invalid_argument("solve_poly_ode: resonant value supplied for lambda != 0");
  if (rhs.is_zero()) return FieldPolynomial(rhs.mode_table());

  // p_d = r_d / lambda, then p_j = (r_j - (j+1) p_{j+1}) / lambda.
  const int d = rhs.degree();
  std::vector<SpectralField> p(static_cast<size_t>(d) + 1, SpectralField(rhs.mode_table()));
  p[d] = rhs.coeff(d);
  p[d] *= 1.0 / lambda;
  for (int j = d - 1; j >= 0; --j) {
    SpectralField c = p[j + 1];
    c *= -static_cast<double>(j + 1);
    c += rhs.coeff(j);
    c *= 1.0 / lambda;
    p[j] = std::move(c);
  }
  return FieldPolynomial(rhs.mode_table(), std::move(p));
}

std::vector<double> exp_poly_tail_integral(int degree, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("exp_poly_tail_integral: beta must be positive");
  if (degree < 0) throw std::invalid_argument("exp_poly_tail_integral: degree must be >= 0");
  std::vector<double> coeffs(static_cast<size_t>(degree) + 1);
  // c_n = d!/(n! beta^{d+1-n}); accumulate the factorial ratio downward.
  double factorial_ratio = 1.0;  // d!/n! at n = d
  for (int n = degree; n >= 0; --n) {
    coeffs[n] = factorial_ratio / std::pow(beta, static_cast<double>(degree + 1 - n));
    factorial_ratio *= static_cast<double>(n);
  }
  return coeffs;
}

FieldPolynomial bilinear_poly(const FieldPolynomial& a, const FieldPolynomial& b) {
  if (a.mode_table()->truncation().max_eigenvalue != b.mode_table()->truncation().max_eigenvalue)
    throw std::invalid_argument("bilinear_poly: truncation mismatch");
  FieldPolynomial out(a.mode_table());
  if (a.is_zero() || b.is_zero()) return out;
  for (int r = 0; r <= a.degree() + b.degree(); ++r) {
    SpectralField c(a.mode_table());
    c.mark_solenoidal(true);
    for (int i = std::max(0, r - b.degree()); i <= std::min(r, a.degree()); ++i)
      c += bilinear(a.coeff(i), b.coeff(r - i));
    out.push_coeff(std::move(c));
  }
  out.trim();
  return out;
}

SpectralField eval_term(const ExpansionTerm& term, double t) {
  SpectralField value = term.q.evaluate(t);
  value *= std::exp(-static_cast<double>(term.n) * t);
  return value;
}

}  // namespace gevrey
