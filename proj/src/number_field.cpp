#include "bvk/number_field.hpp"

#include "bvk/errors.hpp"

#include <algorithm>

namespace bvk {

NumberField::NumberField(Poly minpoly, RootInterval interval)
    : minpoly_(minpoly.monic()), interval_(interval) {
  if (minpoly_.degree() < 1) throw PreconditionError("minimal polynomial must have positive degree");
  if (minpoly_.degree() == 1) {
    Rational root = -minpoly_.coeff(0);
    interval_ = {root, root};
  } else if (interval_.lo == interval_.hi) {
    throw PreconditionError("irreducible polynomial of degree > 1 has no rational root");
  }
}

Poly NumberField::inverse(const Poly& a) const {
  Poly r = reduce(a);
  if (r.is_zero()) throw PreconditionError("inverse of zero in a number field");
  PolyXgcd e = xgcd(r, minpoly_);
  if (e.g.degree() != 0) throw PreconditionError("defining polynomial is not irreducible");
  return reduce(e.s);
}

RootInterval NumberField::refine(RootInterval r) const {
  if (r.lo == r.hi) return r;
  Rational mid = (r.lo + r.hi) / 2;
  int sm = minpoly_.sign_at(mid);
  if (sm == 0) return {mid, mid};
  if (sm == minpoly_.sign_at(r.hi)) {
    r.hi = mid;
  } else {
    r.lo = mid;
  }
  return r;
}

std::pair<Rational, Rational> NumberField::evaluate(const Poly& a, const RootInterval& r) const {
  // Horner's rule in interval arithmetic.
  Rational lo = 0, hi = 0;
  const auto& c = a.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) {
    Rational p1 = lo * r.lo, p2 = lo * r.hi, p3 = hi * r.lo, p4 = hi * r.hi;
    lo = std::min({p1, p2, p3, p4}) + c[i];
    hi = std::max({p1, p2, p3, p4}) + c[i];
  }
  return {lo, hi};
}

int NumberField::sign(const Poly& a) const {
  Poly r = reduce(a);
  if (r.is_zero()) return 0;
  RootInterval iv = interval_;
  // Nonzero in the field means nonzero at λ, so refinement terminates.
  for (;;) {
    auto [lo, hi] = evaluate(r, iv);
    if (lo > 0) return 1;
    if (hi < 0) return -1;
    iv = refine(iv);
  }
}

std::pair<Rational, Rational> NumberField::enclose(const Poly& a, const Rational& width) const {
  Poly r = reduce(a);
  RootInterval iv = interval_;
  for (;;) {
    auto e = evaluate(r, iv);
    if (e.second - e.first <= width) return e;
    iv = refine(iv);
  }
}

double NumberField::approx(const Poly& a) const {
  auto [lo, hi] = enclose(a, Rational(1, 1000000000000LL));
  return static_cast<double>((lo + hi) / 2);
}

}  // namespace bvk
