#pragma once

#include "bvk/arith.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bvk {

// Dense polynomial over Q, coefficients from the constant term upward, with
// no trailing zeros (the zero polynomial has no coefficients).
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Rational> coeffs);
  static Poly constant(const Rational& c);
  static Poly x();
  static Poly from_integers(const IntVector& coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
  Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const Rational& k) const;
  Poly operator-() const;
  bool operator==(const Poly& o) const = default;

  // Euclidean division: *this = q * d + r with deg r < deg d.
  std::pair<Poly, Poly> divmod(const Poly& d) const;
  Poly operator%(const Poly& d) const { return divmod(d).second; }
  Poly derivative() const;
  Poly monic() const;
  Rational evaluate(const Rational& x) const;
  int sign_at(const Rational& x) const;

  // Scaled to a primitive integer polynomial with positive leading coefficient.
  IntVector primitive_integer() const;
  std::string str(const char* var = "t") const;

 private:
  void trim();
  std::vector<Rational> c_;
};

Poly gcd(Poly a, Poly b);  // monic, or zero
// Extended gcd: returns (g, s, t) with s*a + t*b = g monic.
struct PolyXgcd {
  Poly g, s, t;
};
PolyXgcd xgcd(const Poly& a, const Poly& b);

Poly characteristic_polynomial(const IntMatrix& a);
Poly squarefree_part(const Poly& p);

// Sturm chain of a squarefree polynomial; count of distinct real roots in (a, b].
class SturmChain {
 public:
  explicit SturmChain(const Poly& p);
  int sign_changes(const Rational& x) const;
  int roots_in(const Rational& a, const Rational& b) const;

 private:
  std::vector<Poly> chain_;
};

// Bound on the absolute value of every complex root.
Rational root_bound(const Poly& p);

// Rational interval (lo, hi] containing the largest real root of a
// squarefree polynomial and no other root. lo == hi when the root is that
// rational number.
struct RootInterval {
  Rational lo, hi;
};
RootInterval isolate_largest_root(const Poly& squarefree);

// Irreducible factor over Q (monic, integer coefficients for algebraic
// integers) of the squarefree integer polynomial p having the isolated root
// in `where` as a zero. Candidates come from high-precision numeric roots and
// are accepted only after an exact divisibility and root-location check.
Poly minimal_factor(const Poly& squarefree, const RootInterval& where, int max_degree);

}  // namespace bvk
