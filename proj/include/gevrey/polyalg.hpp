#pragma once

#include <optional>
#include <vector>

#include "gevrey/field.hpp"

namespace gevrey {

// Polynomial in t with SpectralField coefficients, stored densely by power.
// An empty coefficient list is the zero polynomial.
class FieldPolynomial {
 public:
  explicit FieldPolynomial(std::shared_ptr<const ModeTable> modes) : modes_(std::move(modes)) {}
  FieldPolynomial(std::shared_ptr<const ModeTable> modes, std::vector<SpectralField> coeffs);

  static FieldPolynomial constant(SpectralField c);

  const std::shared_ptr<const ModeTable>& mode_table() const { return modes_; }
  const std::vector<SpectralField>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for the zero polynomial
  bool is_zero() const { return coeffs_.empty(); }
  const SpectralField& coeff(int power) const { return coeffs_[power]; }

  void push_coeff(SpectralField c);
  // Drops exactly-zero leading coefficients.
  void trim();

  SpectralField evaluate(double t) const;  // Horner
  FieldPolynomial derivative() const;
  // Antiderivative vanishing at t = 0.
  FieldPolynomial antiderivative() const;

  FieldPolynomial& operator+=(const FieldPolynomial& other);
  friend FieldPolynomial operator+(FieldPolynomial a, const FieldPolynomial& b) { return a += b; }
  FieldPolynomial& operator*=(double s);

 private:
  std::shared_ptr<const ModeTable> modes_;
  std::vector<SpectralField> coeffs_;
};

// One level of the expansion: u_n(t) = q(t) e^{-n t}.
struct ExpansionTerm {
  int n = 1;
  FieldPolynomial q;
};

// Unique polynomial solution of p' + lambda p = rhs.
//
// For lambda != 0 the solution has deg p = deg rhs and is found by descending
// back-substitution; `resonant_value` must be absent.  For lambda == 0 the
// solution is the antiderivative of rhs and `resonant_value` supplies p(0).
FieldPolynomial solve_poly_ode(double lambda, const FieldPolynomial& rhs,
                               const std::optional<SpectralField>& resonant_value = std::nullopt);

// Coefficients [c_0..c_d] with int_t^inf tau^d e^{-beta tau} dtau
// = e^{-beta t} sum_n c_n t^n, i.e. c_n = d!/(n! beta^{d+1-n}).
std::vector<double> exp_poly_tail_integral(int degree, double beta);

// Coefficient of t^r is sum_{i+j=r} B(a_i, b_j).
FieldPolynomial bilinear_poly(const FieldPolynomial& a, const FieldPolynomial& b);

SpectralField eval_term(const ExpansionTerm& term, double t);

}  // namespace gevrey
