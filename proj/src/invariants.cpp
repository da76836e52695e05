#include "bvk/invariants.hpp"

#include "bvk/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace bvk {

namespace {

constexpr std::size_t kMaxResidueStates = 2000000;
constexpr std::size_t kMaxMembershipStates = 200000;

std::string key_of(const IntVector& v) {
  std::string k;
  for (const auto& x : v) {
    k += x.str();
    k += ',';
  }
  return k;
}

IntVector mod_vector(const IntVector& v, const BigInt& n) {
  IntVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = mod(v[i], n);
  return out;
}

IntVector step_mod(const OrderedBratteliDiagram& d, std::size_t level, const IntVector& v, const BigInt& n) {
  const EdgeTable& t = d.table(level);
  IntVector out(t.size());
  for (std::size_t w = 0; w < t.size(); ++w) {
    for (std::size_t s : t[w]) out[w] += v[s];
    out[w] = mod(out[w], n);
  }
  return out;
}

// Coefficients x with sum_i x_i * cols[i] = target, if any.
std::optional<std::vector<Rational>> solve_combination(const std::vector<std::vector<Rational>>& cols,
                                                       const std::vector<Rational>& target) {
  const std::size_t k = cols.size();
  const std::size_t n = target.size();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(k + 1));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) m[r][c] = cols[c][r];
    m[r][k] = target[r];
  }
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < k && row < n; ++c) {
    std::size_t p = row;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) continue;
    std::swap(m[p], m[row]);
    Rational inv = Rational(1) / m[row][c];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || m[r][c] == 0) continue;
      Rational f = m[r][c];
      for (std::size_t j = c; j <= k; ++j) m[r][j] -= f * m[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < n; ++r)
    if (m[r][k] != 0) return std::nullopt;
  std::vector<Rational> x(k);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][k];
  return x;
}

std::vector<Rational> to_rationals(const IntVector& v) {
  std::vector<Rational> out;
  for (const auto& x : v) out.emplace_back(x);
  return out;
}

Rational frac(const Rational& q) {
  BigInt fl = numerator(q) / denominator(q);
  if (numerator(q) < 0 && fl * denominator(q) != numerator(q)) fl -= 1;
  return q - Rational(fl);
}

std::vector<Rational> field_coords(const Poly& p, int degree) {
  std::vector<Rational> out(static_cast<std::size_t>(degree));
  for (int i = 0; i < degree; ++i) out[static_cast<std::size_t>(i)] = p.coeff(static_cast<std::size_t>(i));
  return out;
}

// Annihilating polynomial (monic, integer) of the Krylov sequence h_1, h_2, ...
IntVector height_annihilator(const OrderedBratteliDiagram& d) {
  std::vector<std::vector<Rational>> krylov;
  for (std::size_t k = 1;; ++k) {
    std::vector<Rational> next = to_rationals(d.heights(k));
    if (!krylov.empty()) {
      auto x = solve_combination(krylov, next);
      if (x) {
        IntVector ann;
        for (const auto& c : *x) {
          if (denominator(c) != 1) throw CapabilityError("non-integral height recurrence");
          ann.push_back(-numerator(c));
        }
        ann.push_back(1);
        return ann;
      }
    }
    krylov.push_back(std::move(next));
  }
}

PrimeValuation stationary_valuation(const OrderedBratteliDiagram& d, const BigInt& p, const IntVector& ann) {
  PrimeValuation pv;
  pv.p = p;
  bool all_divisible = true;
  for (std::size_t i = 0; i + 1 < ann.size(); ++i)
    if (ann[i] % p != 0) all_divisible = false;
  if (all_divisible) {
    pv.kind = ValuationKind::Infinity;
    pv.certificate = ValuationCertificate{1, 0, 0, ann};
    return pv;
  }
  // A root of the recurrence is a p-adic unit, so the valuation is finite:
  // find a level whose normalized orbit mod p never returns to zero.
  const IntMatrix& a = d.stationary_matrix();
  std::size_t m = 1;
  for (int guard = 0; guard < 100000; ++guard) {
    IntVector h = d.heights(m);
    unsigned v = valuation(gcd_of(h), p);
    BigInt pv_pow = boost::multiprecision::pow(p, v);
    IntVector s(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) s[i] = mod(h[i] / pv_pow, p);
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t j = 0;; ++j) {
      if (all_zero(s)) {
        m += j;
        break;
      }
      auto [it, fresh] = seen.emplace(key_of(s), j);
      if (!fresh) {
        pv.kind = ValuationKind::Exact;
        pv.value = v;
        pv.certificate = ValuationCertificate{m, it->second, j - it->second, {}};
        return pv;
      }
      if (seen.size() > kMaxResidueStates) throw CapabilityError("residue orbit too long");
      s = mod_vector(a * s, p);
    }
  }
  throw CapabilityError("valuation search did not stabilize");
}

}  // namespace

DividesVerdict divides_unit(const DimGroup& g, const BigInt& n, std::size_t depth) {
  if (n < 1) throw PreconditionError("divisor must be at least 1");
  if (n == 1) return {Ternary::Yes, 0, std::nullopt};
  const OrderedBratteliDiagram& d = g.diagram();
  IntVector state = mod_vector(d.heights(0), n);
  if (d.is_stationary()) {
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t m = 1;; ++m) {
      state = step_mod(d, m - 1, state, n);
      if (all_zero(state)) return {Ternary::Yes, m, std::nullopt};
      auto [it, fresh] = seen.emplace(key_of(state), m);
      if (!fresh) return {Ternary::No, m, ResidueCycle{n, it->second, m - it->second}};
      if (seen.size() > kMaxResidueStates) return {Ternary::Unknown, m, std::nullopt};
    }
  }
  const std::size_t last = std::min(*d.last_level(), depth);
  for (std::size_t m = 1; m <= last; ++m) {
    state = step_mod(d, m - 1, state, n);
    if (all_zero(state)) return {Ternary::Yes, m, std::nullopt};
  }
  return {Ternary::Unknown, last, std::nullopt};
}

bool verify_residue_cycle(const OrderedBratteliDiagram& d, const ResidueCycle& c) {
  if (!d.is_stationary() || c.n < 2 || c.start < 1 || c.period < 1) return false;
  const IntMatrix& a = d.stationary_matrix();
  IntVector h = d.heights(1);
  std::vector<IntVector> residues{mod_vector(d.heights(0), c.n)};
  for (std::size_t m = 1; m <= c.start + c.period; ++m) {
    residues.push_back(mod_vector(h, c.n));
    h = a * h;
  }
  for (std::size_t m = 0; m < residues.size(); ++m)
    if (all_zero(residues[m])) return false;
  return residues[c.start] == residues[c.start + c.period];
}

std::string to_string(ValuationKind k) {
  switch (k) {
    case ValuationKind::Exact: return "exact";
    case ValuationKind::AtLeast: return "at-least";
    default: return "infinity";
  }
}

const PrimeValuation* SupernaturalTruncation::find(const BigInt& p) const {
  for (const auto& e : entries)
    if (e.p == p) return &e;
  return nullptr;
}

SupernaturalTruncation periodic_spectrum(const DimGroup& g, const SpectrumBounds& bounds) {
  const OrderedBratteliDiagram& d = g.diagram();
  SupernaturalTruncation st;
  st.bounds = bounds;
  if (d.is_stationary()) {
    // A prime divides some g_m iff it divides g_{1+|V|}.
    const std::size_t top = 1 + d.vertex_count(1);
    std::vector<BigInt> primes = prime_factors(gcd_of(d.heights(top)));
    IntVector ann = height_annihilator(d);
    st.level_cutoff = top;
    for (const auto& p : primes) {
      PrimeValuation pv = stationary_valuation(d, p, ann);
      if (pv.certificate) st.level_cutoff = std::max(st.level_cutoff, pv.certificate->level);
      st.entries.push_back(std::move(pv));
    }
    st.complete = true;
    return st;
  }
  const std::size_t last = std::min(*d.last_level(), bounds.depth);
  BigInt gl = gcd_of(d.heights(last));
  for (const auto& p : prime_factors(gl)) {
    if (p > bounds.prime_cutoff) continue;
    PrimeValuation pv;
    pv.p = p;
    pv.kind = ValuationKind::AtLeast;
    pv.value = std::min<unsigned>(valuation(gl, p), bounds.valuation_cutoff);
    pv.certificate = ValuationCertificate{last, 0, 0, {}};
    st.entries.push_back(std::move(pv));
  }
  st.level_cutoff = last;
  st.complete = false;
  return st;
}

bool verify_valuation(const OrderedBratteliDiagram& d, const PrimeValuation& v) {
  if (!v.certificate || v.p < 2) return false;
  const ValuationCertificate& c = *v.certificate;
  switch (v.kind) {
    case ValuationKind::AtLeast: {
      if (c.level > d.last_level().value_or(c.level)) return false;
      return gcd_of(d.heights(c.level)) % boost::multiprecision::pow(v.p, v.value) == 0;
    }
    case ValuationKind::Infinity: {
      if (!d.is_stationary() || c.annihilator.size() < 2 || c.annihilator.back() != 1 || c.level < 1) return false;
      for (std::size_t i = 0; i + 1 < c.annihilator.size(); ++i)
        if (c.annihilator[i] % v.p != 0) return false;
      IntVector total(d.vertex_count(1));
      for (std::size_t i = 0; i < c.annihilator.size(); ++i)
        total = total + scaled(d.heights(c.level + i), c.annihilator[i]);
      return all_zero(total);
    }
    case ValuationKind::Exact: {
      if (!d.is_stationary() || c.level < 1 || c.period < 1) return false;
      IntVector h = d.heights(c.level);
      if (valuation(gcd_of(h), v.p) != v.value) return false;
      BigInt scale = boost::multiprecision::pow(v.p, v.value);
      IntVector s(h.size());
      for (std::size_t i = 0; i < h.size(); ++i) s[i] = mod(h[i] / scale, v.p);
      const IntMatrix& a = d.stationary_matrix();
      IntVector at_pre;
      for (std::size_t j = 0; j <= c.preperiod + c.period; ++j) {
        if (all_zero(s)) return false;
        if (j == c.preperiod) at_pre = s;
        if (j == c.preperiod + c.period) return s == at_pre;
        s = mod_vector(a * s, v.p);
      }
      return false;
    }
  }
  return false;
}

std::string to_string(SpectraComparison::Verdict v) {
  switch (v) {
    case SpectraComparison::Verdict::Equal: return "equal";
    case SpectraComparison::Verdict::Distinct: return "distinct";
    default: return "unknown";
  }
}

SpectraComparison spectra_equal(const DimGroup& a, const DimGroup& b, const SpectrumBounds& bounds) {
  SpectraComparison out;
  out.first = periodic_spectrum(a, bounds);
  out.second = periodic_spectrum(b, bounds);
  if (out.first.complete && out.second.complete) {
    std::set<BigInt> primes;
    for (const auto& e : out.first.entries) primes.insert(e.p);
    for (const auto& e : out.second.entries) primes.insert(e.p);
    // nullopt encodes an infinite valuation.
    auto val = [](const SupernaturalTruncation& s, const BigInt& p) -> std::optional<unsigned> {
      const PrimeValuation* e = s.find(p);
      if (!e) return 0u;
      if (e->kind == ValuationKind::Infinity) return std::nullopt;
      return e->value;
    };
    std::optional<BigInt> best;
    bool in_first = false;
    for (const auto& p : primes) {
      auto va = val(out.first, p), vb = val(out.second, p);
      if (va == vb) continue;
      unsigned lower = !va ? *vb : (!vb ? *va : std::min(*va, *vb));
      BigInt n = boost::multiprecision::pow(p, lower + 1);
      if (!best || n < *best) {
        best = n;
        in_first = !va || (vb && *va > *vb);
      }
    }
    if (!best) {
      out.verdict = SpectraComparison::Verdict::Equal;
      return out;
    }
    out.verdict = SpectraComparison::Verdict::Distinct;
    out.witness = *best;
    out.witness_in_first = in_first;
    return out;
  }
  // Without complete spectra, only a directly certified divisor separates.
  for (BigInt n = 2; n <= 64; ++n) {
    auto da = divides_unit(a, n, bounds.depth), db = divides_unit(b, n, bounds.depth);
    if ((da.verdict == Ternary::Yes && db.verdict == Ternary::No) ||
        (da.verdict == Ternary::No && db.verdict == Ternary::Yes)) {
      out.verdict = SpectraComparison::Verdict::Distinct;
      out.witness = n;
      out.witness_in_first = da.verdict == Ternary::Yes;
      return out;
    }
  }
  return out;
}

std::vector<IntVector> lattice_basis(std::vector<IntVector> rows) {
  std::vector<IntVector> basis;
  if (rows.empty()) return basis;
  const std::size_t width = rows[0].size();
  for (std::size_t c = 0; c < width; ++c) {
    for (;;) {
      std::size_t pivot = rows.size();
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r][c] == 0) continue;
        if (pivot == rows.size() || abs(rows[r][c]) < abs(rows[pivot][c])) pivot = r;
      }
      if (pivot == rows.size()) break;
      bool reduced = false;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == pivot || rows[r][c] == 0) continue;
        BigInt q = rows[r][c] / rows[pivot][c];
        for (std::size_t k = 0; k < width; ++k) rows[r][k] -= q * rows[pivot][k];
        reduced = true;
      }
      bool alone = true;
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (r != pivot && rows[r][c] != 0) alone = false;
      if (alone) {
        IntVector row = rows[pivot];
        if (row[c] < 0)
          for (auto& x : row) x = -x;
        basis.push_back(row);
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(pivot));
        break;
      }
      if (!reduced) break;
    }
  }
  return basis;
}

TraceImageGroup trace_image_group(const DimGroup& g) {
  TraceImageGroup out;
  const PerronData* pd = nullptr;
  try {
    pd = &g.perron_data();
  } catch (const CapabilityError& e) {
    out.kind = TraceImageGroup::Kind::Undetermined;
    out.note = e.what();
    return out;
  }
  const NumberField& f = pd->field;
  IntVector h1 = g.diagram().heights(1);
  if (f.degree() == 1) {
    out.kind = TraceImageGroup::Kind::Rational;
    out.field = f;
    // Left eigenvector scaled to a primitive integer vector.
    IntVector v;
    {
      BigInt l = 1;
      for (const auto& e : pd->left) l = l / gcd(l, denominator(e.coeff(0))) * denominator(e.coeff(0));
      for (const auto& e : pd->left) v.push_back(numerator(e.coeff(0)) * (l / denominator(e.coeff(0))));
      BigInt gg = gcd_of(v);
      for (auto& x : v) x /= gg;
    }
    BigInt c1 = 0;
    for (std::size_t i = 0; i < v.size(); ++i) c1 += v[i] * h1[i];
    BigInt lambda = numerator(f.interval().lo);
    std::set<BigInt> primes;
    for (const auto& p : prime_factors(c1)) primes.insert(p);
    for (const auto& p : prime_factors(lambda)) primes.insert(p);
    for (const auto& p : primes) {
      if (lambda % p == 0) {
        out.denominator.emplace_back(p, std::nullopt);
      } else {
        out.denominator.emplace_back(p, valuation(c1, p));
      }
    }
    out.generators.push_back(Poly::constant(1));
    for (const auto& x : v) out.generators.push_back(Poly::constant(Rational(x, c1)));
    for (const auto& gen : out.generators) out.approximations.push_back(static_cast<double>(gen.coeff(0)));
    return out;
  }
  out.kind = TraceImageGroup::Kind::Field;
  out.field = f;
  out.normalization = pd->normalization;
  const int deg = f.degree();
  BigInt den = 1;
  for (const auto& e : pd->left)
    for (const auto& c : e.coeffs()) den = den / gcd(den, denominator(c)) * denominator(c);
  std::vector<IntVector> rows;
  for (const auto& e : pd->left) {
    IntVector r;
    for (const auto& c : field_coords(e, deg)) r.push_back(numerator(c * Rational(den)));
    rows.push_back(r);
  }
  for (const auto& b : lattice_basis(rows)) {
    std::vector<Rational> c;
    for (const auto& x : b) c.emplace_back(x, den);
    out.lattice.push_back(Poly(c));
  }
  if (out.lattice.size() != static_cast<std::size_t>(deg)) {
    throw PreconditionError("trace lattice does not have full rank");
  }
  std::vector<std::vector<Rational>> basis_cols;
  for (const auto& b : out.lattice) basis_cols.push_back(field_coords(b, deg));
  out.lambda_action = IntMatrix(static_cast<std::size_t>(deg), static_cast<std::size_t>(deg));
  for (std::size_t j = 0; j < out.lattice.size(); ++j) {
    auto z = solve_combination(basis_cols, field_coords(f.mul(f.generator(), out.lattice[j]), deg));
    if (!z) throw PreconditionError("lattice is not stable under multiplication by the Perron root");
    for (std::size_t k = 0; k < z->size(); ++k) {
      if (denominator((*z)[k]) != 1) throw PreconditionError("lattice is not stable under the Perron root");
      out.lambda_action(j, k) = numerator((*z)[k]);
    }
  }
  out.generators.push_back(Poly::constant(1));
  for (const auto& e : pd->left) out.generators.push_back(f.mul(e, pd->normalization));
  for (const auto& gen : out.generators) out.approximations.push_back(f.approx(gen));
  return out;
}

Ternary trace_image_contains(const TraceImageGroup& g, const Poly& x) {
  switch (g.kind) {
    case TraceImageGroup::Kind::Undetermined: return Ternary::Unknown;
    case TraceImageGroup::Kind::Rational: {
      Poly r = g.field.reduce(x);
      return trace_image_contains(g, r.coeff(0));
    }
    case TraceImageGroup::Kind::Field: break;
  }
  const NumberField& f = g.field;
  const int deg = f.degree();
  Poly y = f.mul(x, f.inverse(g.normalization));
  std::vector<std::vector<Rational>> basis_cols;
  for (const auto& b : g.lattice) basis_cols.push_back(field_coords(b, deg));
  auto z = solve_combination(basis_cols, field_coords(y, deg));
  if (!z) return Ternary::No;
  // x is in the group iff λ^k y lies in L for some k: iterate the
  // coordinates under the transpose of the λ-action modulo Z^d.
  std::vector<Rational> q(z->size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = frac((*z)[i]);
  std::set<std::vector<Rational>> seen;
  for (;;) {
    if (std::all_of(q.begin(), q.end(), [](const Rational& r) { return r == 0; })) return Ternary::Yes;
    if (!seen.insert(q).second) return Ternary::No;
    if (seen.size() > kMaxMembershipStates) return Ternary::Unknown;
    std::vector<Rational> next(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      Rational s = 0;
      for (std::size_t j = 0; j < q.size(); ++j) s += q[j] * Rational(g.lambda_action(j, k));
      next[k] = frac(s);
    }
    q = std::move(next);
  }
}

Ternary trace_image_contains(const TraceImageGroup& g, const Rational& x) {
  switch (g.kind) {
    case TraceImageGroup::Kind::Undetermined: return Ternary::Unknown;
    case TraceImageGroup::Kind::Field: return trace_image_contains(g, Poly::constant(x));
    case TraceImageGroup::Kind::Rational: break;
  }
  BigInt den = denominator(x);
  for (const auto& p : prime_factors(den)) {
    auto it = std::find_if(g.denominator.begin(), g.denominator.end(), [&](const auto& e) { return e.first == p; });
    if (it == g.denominator.end()) return Ternary::No;
    if (it->second && valuation(den, p) > *it->second) return Ternary::No;
  }
  return Ternary::Yes;
}

Ternary trace_images_isomorphic(const TraceImageGroup& a, const TraceImageGroup& b) {
  using K = TraceImageGroup::Kind;
  if (a.kind == K::Undetermined || b.kind == K::Undetermined) return Ternary::Unknown;
  // A unital order isomorphism between subgroups of R is the identity, so
  // the question is equality of subsets.
  if (a.kind == K::Rational && b.kind == K::Rational) {
    return a.denominator == b.denominator ? Ternary::Yes : Ternary::No;
  }
  if (a.kind != b.kind) return Ternary::No;
  if (a.field.degree() != b.field.degree()) return Ternary::No;
  if (!(a.field.minpoly() == b.field.minpoly())) return Ternary::Unknown;
  Ternary result = Ternary::Yes;
  auto check = [&](const TraceImageGroup& from, const TraceImageGroup& into) {
    for (const auto& l : from.lattice) {
      Ternary t = trace_image_contains(into, from.field.mul(l, from.normalization));
      if (t == Ternary::No) return Ternary::No;
      if (t == Ternary::Unknown) result = Ternary::Unknown;
    }
    return Ternary::Yes;
  };
  if (check(a, b) == Ternary::No || check(b, a) == Ternary::No) return Ternary::No;
  return result;
}

}  // namespace bvk
