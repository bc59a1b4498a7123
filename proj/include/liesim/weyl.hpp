#pragma once

#include <complex>
#include <map>
#include <span>
#include <utility>

namespace liesim::algebra {

inline constexpr int kWeylDegreeCap = 64;

// Polynomial in the canonical pair (x, p) with [x, p] = i, kept in normal
// order: every term is x^a p^b. Products reorder via
//   p^m x^n = sum_k k! C(m,k) C(n,k) (-i)^k x^(n-k) p^(m-k),
// which is exact; coefficients are complex doubles and exact cancellations
// are pruned, so integer-coefficient identities hold without tolerance.
class WeylPolynomial {
 public:
  using Coeff = std::complex<double>;
  using Key = std::pair<int, int>;  // (x power, p power)

  WeylPolynomial() = default;

  static WeylPolynomial monomial(int x_pow, int p_pow, Coeff c = Coeff(1.0, 0.0));
  static WeylPolynomial position(int power = 1) { return monomial(power, 0); }
  static WeylPolynomial momentum(int power = 1) { return monomial(0, power); }

  bool is_zero(double tol = 0.0) const;
  // Degrees over stored terms; -1 for the zero polynomial.
  int degree() const;
  int position_degree() const;
  int momentum_degree() const;
  Coeff coefficient(int x_pow, int p_pow) const;
  double max_abs_coeff() const;
  const std::map<Key, Coeff>& terms() const { return terms_; }

  WeylPolynomial& operator+=(const WeylPolynomial& o);
  WeylPolynomial& operator-=(const WeylPolynomial& o);
  WeylPolynomial& operator*=(Coeff c);

  friend WeylPolynomial operator+(WeylPolynomial a, const WeylPolynomial& b) { return a += b; }
  friend WeylPolynomial operator-(WeylPolynomial a, const WeylPolynomial& b) { return a -= b; }
  friend WeylPolynomial operator*(WeylPolynomial a, Coeff c) { return a *= c; }
  friend WeylPolynomial operator*(Coeff c, WeylPolynomial a) { return a *= c; }

 private:
  std::map<Key, Coeff> terms_;
  void add_term(int a, int b, Coeff c);
  friend WeylPolynomial weyl_product(const WeylPolynomial&, const WeylPolynomial&, int);
};

// Normal-ordered product. Throws std::domain_error when a term would exceed
// the degree cap or a coefficient stops being representable.
WeylPolynomial weyl_product(const WeylPolynomial& a, const WeylPolynomial& b,
                            int degree_cap = kWeylDegreeCap);

WeylPolynomial weyl_commutator(const WeylPolynomial& a, const WeylPolynomial& b,
                               int degree_cap = kWeylDegreeCap);

// Right-nested [ops[0], [ops[1], [... ops.back()]]].
WeylPolynomial nested_weyl_commutator(std::span<const WeylPolynomial> ops,
                                      int degree_cap = kWeylDegreeCap);

// Degree of a length-(j+1) nested commutator built from {x^q, p^2}:
// d_j = (q-2)(j+2)/2 + 2.
double nested_commutator_degree(int q, int j);

}  // namespace liesim::algebra
