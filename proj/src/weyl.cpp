#include "liesim/weyl.hpp"

#include <cmath>
#include <stdexcept>

namespace liesim::algebra {

WeylPolynomial WeylPolynomial::monomial(int x_pow, int p_pow, Coeff c) {
  if (x_pow < 0 || p_pow < 0) throw std::invalid_argument("monomial: negative power");
  WeylPolynomial out;
  out.add_term(x_pow, p_pow, c);
  return out;
}

void WeylPolynomial::add_term(int a, int b, Coeff c) {
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
    throw std::domain_error("weyl coefficient overflow (degree-cap error)");
  auto [it, inserted] = terms_.try_emplace({a, b}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Coeff(0.0, 0.0)) terms_.erase(it);
  } else if (c == Coeff(0.0, 0.0)) {
    terms_.erase(it);
  }
}

bool WeylPolynomial::is_zero(double tol) const {
  if (tol == 0.0) return terms_.empty();
  for (const auto& [k, c] : terms_)
    if (std::abs(c) > tol) return false;
  return true;
}

int WeylPolynomial::degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k.first + k.second);
  return d;
}

int WeylPolynomial::position_degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k.first);
  return d;
}

int WeylPolynomial::momentum_degree() const {
  int d = -1;
  for (const auto& [k, c] : terms_) d = std::max(d, k.second);
  return d;
}

WeylPolynomial::Coeff WeylPolynomial::coefficient(int x_pow, int p_pow) const {
  auto it = terms_.find({x_pow, p_pow});
  return it == terms_.end() ? Coeff(0.0, 0.0) : it->second;
}

double WeylPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

WeylPolynomial& WeylPolynomial::operator+=(const WeylPolynomial& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
  return *this;
}

WeylPolynomial& WeylPolynomial::operator-=(const WeylPolynomial& o) {
  for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
  return *this;
}

WeylPolynomial& WeylPolynomial::operator*=(Coeff c) {
  if (c == Coeff(0.0, 0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) {
    v *= c;
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::domain_error("weyl coefficient overflow (degree-cap error)");
  }
  return *this;
}

WeylPolynomial weyl_product(const WeylPolynomial& a, const WeylPolynomial& b, int degree_cap) {
  if (degree_cap < 0) throw std::invalid_argument("weyl_product: negative degree cap");
  WeylPolynomial out;
  const WeylPolynomial::Coeff minus_i(0.0, -1.0);
  for (const auto& [ka, ca] : a.terms()) {
    const auto [a1, b1] = ka;
    for (const auto& [kb, cb] : b.terms()) {
      const auto [a2, b2] = kb;
      if (a1 + a2 > degree_cap || b1 + b2 > degree_cap)
        throw std::domain_error("weyl product exceeds degree cap");
      // (x^a1 p^b1)(x^a2 p^b2): contract k pairs across the middle
      WeylPolynomial::Coeff f = ca * cb;
      const int kmax = std::min(b1, a2);
      for (int k = 0;; ++k) {
        out.add_term(a1 + a2 - k, b1 + b2 - k, f);
        if (k == kmax) break;
        f *= minus_i * (static_cast<double>((b1 - k)) * (a2 - k) / (k + 1));
      }
    }
  }
  return out;
}

WeylPolynomial weyl_commutator(const WeylPolynomial& a, const WeylPolynomial& b, int degree_cap) {
  WeylPolynomial out = weyl_product(a, b, degree_cap);
  out -= weyl_product(b, a, degree_cap);
  return out;
}

WeylPolynomial nested_weyl_commutator(std::span<const WeylPolynomial> ops, int degree_cap) {
  if (ops.empty()) throw std::invalid_argument("nested_weyl_commutator: empty operator list");
  WeylPolynomial acc = ops.back();
  for (auto it = ops.rbegin() + 1; it != ops.rend(); ++it)
    acc = weyl_commutator(*it, acc, degree_cap);
  return acc;
}

double nested_commutator_degree(int q, int j) {
  if (q < 2 || j < 0) throw std::invalid_argument("nested_commutator_degree: bad arguments");
  return (q - 2) * (j + 2) / 2.0 + 2.0;
}

}  // namespace liesim::algebra
