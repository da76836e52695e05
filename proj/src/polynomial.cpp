#include "bvk/polynomial.hpp"

#include "bvk/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <complex>

namespace bvk {

Poly::Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

Poly Poly::constant(const Rational& c) { return Poly({c}); }
Poly Poly::x() { return Poly({Rational(0), Rational(1)}); }

Poly Poly::from_integers(const IntVector& coeffs) {
  std::vector<Rational> c;
  for (const auto& x : coeffs) c.emplace_back(x);
  return Poly(std::move(c));
}

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::operator+(const Poly& o) const {
  std::vector<Rational> c(std::max(c_.size(), o.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeff(i) + o.coeff(i);
  return Poly(std::move(c));
}

Poly Poly::operator-(const Poly& o) const {
  std::vector<Rational> c(std::max(c_.size(), o.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeff(i) - o.coeff(i);
  return Poly(std::move(c));
}

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return Poly();
  std::vector<Rational> c(c_.size() + o.c_.size() - 1);
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) c[i + j] += c_[i] * o.c_[j];
  }
  return Poly(std::move(c));
}

Poly Poly::operator*(const Rational& k) const {
  std::vector<Rational> c(c_);
  for (auto& x : c) x *= k;
  return Poly(std::move(c));
}

Poly Poly::operator-() const { return *this * Rational(-1); }

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
  if (d.is_zero()) throw PreconditionError("polynomial division by zero");
  std::vector<Rational> r = c_;
  const std::size_t dd = d.c_.size() - 1;
  if (r.size() <= dd) return {Poly(), *this};
  std::vector<Rational> q(r.size() - dd);
  for (std::size_t i = r.size(); i-- > dd;) {
    if (r[i] == 0) continue;
    Rational f = r[i] / d.c_.back();
    q[i - dd] = f;
    for (std::size_t j = 0; j <= dd; ++j) r[i - dd + j] -= f * d.c_[j];
  }
  r.resize(dd);
  return {Poly(std::move(q)), Poly(std::move(r))};
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<Rational> c(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) c[i - 1] = c_[i] * static_cast<long long>(i);
  return Poly(std::move(c));
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  return *this * (Rational(1) / c_.back());
}

Rational Poly::evaluate(const Rational& x) const {
  Rational acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
  return acc;
}

int Poly::sign_at(const Rational& x) const {
  Rational v = evaluate(x);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

IntVector Poly::primitive_integer() const {
  BigInt l = 1;
  for (const auto& c : c_) {
    const BigInt& den = denominator(c);
    l = l / gcd(l, den) * den;
  }
  IntVector out;
  for (const auto& c : c_) out.push_back(numerator(c) * (l / denominator(c)));
  BigInt g = gcd_of(out);
  if (g == 0) return out;
  if (out.back() < 0) g = -g;
  for (auto& x : out) x /= g;
  return out;
}

std::string Poly::str(const char* var) const {
  if (is_zero()) return "0";
  std::string s;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    Rational c = c_[i];
    bool neg = c < 0;
    if (neg) c = -c;
    if (s.empty()) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    bool unit = c == 1 && i > 0;
    if (!unit) s += to_string(c);
    if (i > 0) {
      if (!unit) s += "*";
      s += var;
      if (i > 1) s += "^" + std::to_string(i);
    }
  }
  return s;
}

Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

PolyXgcd xgcd(const Poly& a, const Poly& b) {
  Poly r0 = a, r1 = b;
  Poly s0 = Poly::constant(1), s1;
  Poly t0, t1 = Poly::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = r0.divmod(r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly s2 = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    Poly t2 = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  Rational inv = Rational(1) / r0.leading();
  return {r0 * inv, s0 * inv, t0 * inv};
}

Poly characteristic_polynomial(const IntMatrix& a) {
  // Faddeev-LeVerrier over the integers: c_{n-k} = -tr(A M_k) / k.
  const std::size_t n = a.rows();
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  IntMatrix m(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    IntMatrix am = a * m;
    for (std::size_t i = 0; i < n; ++i) am(i, i) += numerator(c[n - k + 1]);
    m = am;
    IntMatrix prod = a * m;
    BigInt tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += prod(i, i);
    c[n - k] = Rational(-tr, static_cast<long long>(k));
  }
  return Poly(std::move(c));
}

Poly squarefree_part(const Poly& p) {
  Poly g = gcd(p, p.derivative());
  return p.divmod(g).first.monic();
}

SturmChain::SturmChain(const Poly& p) {
  chain_.push_back(p);
  chain_.push_back(p.derivative());
  while (!chain_.back().is_zero()) {
    Poly r = chain_[chain_.size() - 2] % chain_.back();
    chain_.push_back(-r);
  }
  chain_.pop_back();
}

int SturmChain::sign_changes(const Rational& x) const {
  int changes = 0, last = 0;
  for (const auto& q : chain_) {
    int s = q.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int SturmChain::roots_in(const Rational& a, const Rational& b) const {
  return sign_changes(a) - sign_changes(b);
}

Rational root_bound(const Poly& p) {
  Rational m = 0;
  for (int i = 0; i < p.degree(); ++i) {
    Rational q = p.coeff(static_cast<std::size_t>(i)) / p.leading();
    if (q < 0) q = -q;
    m = std::max(m, q);
  }
  return m + 1;
}

RootInterval isolate_largest_root(const Poly& p) {
  SturmChain sc(p);
  Rational hi = root_bound(p), lo = -hi;
  if (sc.roots_in(lo, hi) == 0) throw PreconditionError("polynomial has no real root");
  while (sc.roots_in(lo, hi) > 1) {
    Rational mid = (lo + hi) / 2;
    if (sc.roots_in(mid, hi) >= 1) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (p.sign_at(hi) == 0) lo = hi;
  return {lo, hi};
}

namespace {

using Real = boost::multiprecision::cpp_bin_float_100;
using Complex = boost::multiprecision::cpp_complex_100;

std::vector<Complex> numeric_roots(const Poly& monic_p) {
  const int n = monic_p.degree();
  std::vector<Complex> a(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const Rational& c = monic_p.coeff(static_cast<std::size_t>(i));
    a[static_cast<std::size_t>(i)] = Complex(Real(numerator(c)) / Real(denominator(c)));
  }
  auto eval = [&](const Complex& z) {
    Complex acc = 0;
    for (int i = n; i >= 0; --i) acc = acc * z + a[static_cast<std::size_t>(i)];
    return acc;
  };
  std::vector<Complex> z(static_cast<std::size_t>(n));
  const Complex seed(Real("0.4"), Real("0.9"));
  Real radius = Real(numerator(root_bound(monic_p))) / Real(denominator(root_bound(monic_p)));
  for (int i = 0; i < n; ++i) {
    Complex w = seed;
    for (int k = 0; k < i; ++k) w *= seed;
    z[static_cast<std::size_t>(i)] = w * radius;
  }
  const Real tol = Real("1e-90");
  for (int iter = 0; iter < 5000; ++iter) {
    Real delta = 0;
    for (int i = 0; i < n; ++i) {
      Complex den = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
      if (den == Complex(0)) den = Complex(tol);
      Complex step = eval(z[static_cast<std::size_t>(i)]) / den;
      z[static_cast<std::size_t>(i)] -= step;
      delta = std::max(delta, Real(abs(step)));
    }
    if (delta < tol) break;
  }
  return z;
}

}  // namespace

Poly minimal_factor(const Poly& p, const RootInterval& where, int max_degree) {
  if (where.lo == where.hi) return Poly({-where.lo, Rational(1)});
  Poly mp = p.monic();
  const int n = mp.degree();
  if (n > max_degree) {
    throw CapabilityError("degree " + std::to_string(n) + " exceeds the supported bound " +
                          std::to_string(max_degree));
  }
  if (n == 1) return mp;
  std::vector<Complex> roots = numeric_roots(mp);
  // The numeric root closest to the isolated real root stands in for it.
  Real mid = (Real(numerator(where.lo)) / Real(denominator(where.lo)) +
              Real(numerator(where.hi)) / Real(denominator(where.hi))) / 2;
  std::size_t anchor = 0;
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (abs(roots[i] - Complex(mid)) < abs(roots[anchor] - Complex(mid))) anchor = i;
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < roots.size(); ++i)
    if (i != anchor) others.push_back(i);
  const std::size_t k = others.size();
  // Subsets of the other roots in order of increasing size.
  std::vector<unsigned> masks(std::size_t{1} << k);
  for (unsigned m = 0; m < masks.size(); ++m) masks[m] = m;
  std::stable_sort(masks.begin(), masks.end(),
                   [](unsigned x, unsigned y) { return __builtin_popcount(x) < __builtin_popcount(y); });
  for (unsigned mask : masks) {
    std::vector<Complex> coeffs{Complex(1)};
    auto multiply = [&](const Complex& r) {
      std::vector<Complex> next(coeffs.size() + 1, Complex(0));
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        next[i + 1] += coeffs[i];
        next[i] -= coeffs[i] * r;
      }
      coeffs = std::move(next);
    };
    multiply(roots[anchor]);
    for (std::size_t b = 0; b < k; ++b)
      if (mask & (1u << b)) multiply(roots[others[b]]);
    std::vector<Rational> rc;
    bool near_integral = true;
    for (const auto& c : coeffs) {
      Real re = c.real();
      Real rounded = boost::multiprecision::round(re);
      if (abs(re - rounded) > Real("1e-30") || abs(c.imag()) > Real("1e-30")) {
        near_integral = false;
        break;
      }
      rc.emplace_back(rounded.convert_to<BigInt>());
    }
    if (!near_integral) continue;
    Poly cand(std::move(rc));
    if (!(mp % cand).is_zero()) continue;
    SturmChain sc(cand);
    if (sc.roots_in(where.lo, where.hi) != 1) continue;
    return cand;
  }
  throw CapabilityError("could not identify the irreducible factor of " + mp.str());
}

}  // namespace bvk
