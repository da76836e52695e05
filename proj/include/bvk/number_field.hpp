#pragma once

#include "bvk/polynomial.hpp"

#include <string>

namespace bvk {

// Q(λ) for a real algebraic number λ, given by its minimal polynomial and an
// isolating interval. Elements are polynomials in t reduced modulo the
// minimal polynomial.
class NumberField {
 public:
  NumberField() = default;
  NumberField(Poly minpoly, RootInterval interval);

  const Poly& minpoly() const { return minpoly_; }
  const RootInterval& interval() const { return interval_; }
  int degree() const { return minpoly_.degree(); }

  Poly reduce(const Poly& a) const { return a % minpoly_; }
  Poly mul(const Poly& a, const Poly& b) const { return (a * b) % minpoly_; }
  Poly inverse(const Poly& a) const;
  Poly generator() const { return reduce(Poly::x()); }

  // Exact sign of a(λ).
  int sign(const Poly& a) const;
  // Interval [lo, hi] containing a(λ), of width at most `width`.
  std::pair<Rational, Rational> enclose(const Poly& a, const Rational& width) const;
  double approx(const Poly& a) const;

 private:
  RootInterval refine(RootInterval r) const;
  std::pair<Rational, Rational> evaluate(const Poly& a, const RootInterval& r) const;

  Poly minpoly_;
  RootInterval interval_;
};

}  // namespace bvk
