#include "bvk/dimgroup.hpp"

#include "bvk/errors.hpp"

#include <algorithm>

namespace bvk {

std::string to_string(Ternary t) {
  switch (t) {
    case Ternary::Yes: return "yes";
    case Ternary::No: return "no";
    default: return "unknown";
  }
}

std::string to_string(Positivity p) {
  switch (p) {
    case Positivity::Positive: return "positive";
    case Positivity::Zero: return "zero";
    case Positivity::Negative: return "negative";
    case Positivity::NotComparable: return "not-comparable";
    default: return "unknown";
  }
}

namespace {

// Kernel vector of a square matrix over the field with one-dimensional
// kernel; the free coordinate is set to 1.
std::vector<Poly> kernel_vector(const NumberField& f, std::vector<std::vector<Poly>> m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < n; ++c) {
    std::size_t p = row;
    while (p < n && f.reduce(m[p][c]).is_zero()) ++p;
    if (p == n) continue;
    std::swap(m[p], m[row]);
    Poly inv = f.inverse(m[row][c]);
    for (auto& x : m[row]) x = f.mul(x, inv);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row || f.reduce(m[r][c]).is_zero()) continue;
      Poly factor = m[r][c];
      for (std::size_t k = 0; k < n; ++k) m[r][k] = f.reduce(m[r][k] - f.mul(factor, m[row][k]));
    }
    pivot_col.push_back(c);
    ++row;
  }
  if (pivot_col.size() + 1 != n) throw PreconditionError("Perron eigenspace is not one-dimensional");
  std::size_t free = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (std::find(pivot_col.begin(), pivot_col.end(), c) == pivot_col.end()) {
      free = c;
      break;
    }
  }
  std::vector<Poly> v(n);
  v[free] = Poly::constant(1);
  for (std::size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = f.reduce(-m[r][free]);
  return v;
}

PerronData compute_perron(const OrderedBratteliDiagram& d, int max_degree) {
  const IntMatrix& a = d.stationary_matrix();
  const std::size_t n = a.rows();
  PerronData pd;
  pd.charpoly = characteristic_polynomial(a);
  Poly sf = squarefree_part(pd.charpoly);
  RootInterval where = isolate_largest_root(sf);
  Poly minpoly = minimal_factor(sf, where, max_degree);
  pd.field = NumberField(minpoly, where);
  const NumberField& f = pd.field;
  Poly lambda = f.generator();
  // v A = λ v, i.e. (A^T - λ I) v^T = 0.
  std::vector<std::vector<Poly>> m(n, std::vector<Poly>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = Poly::constant(Rational(a(j, i)));
      if (i == j) m[i][j] = f.reduce(m[i][j] - lambda);
    }
  }
  pd.left = kernel_vector(f, std::move(m));
  int s = f.sign(pd.left[0]);
  if (s < 0) {
    for (auto& x : pd.left) x = -x;
  }
  for (const auto& x : pd.left) {
    if (f.sign(x) <= 0) throw PreconditionError("Perron eigenvector is not strictly positive");
  }
  IntVector h1 = d.heights(1);
  Poly total;
  for (std::size_t i = 0; i < n; ++i) total = total + pd.left[i] * Rational(h1[i]);
  pd.normalization = f.inverse(total);
  return pd;
}

}  // namespace

DimGroup::DimGroup(OrderedBratteliDiagram d) : d_(std::move(d)) {
  if (!d_.is_stationary()) return;
  primitive_stationary_ = validate(d_, 1).primitive == ValidationReport::Verdict::Yes;
  if (!primitive_stationary_) return;
  try {
    perron_ = compute_perron(d_, kMaxFieldDegree);
  } catch (const CapabilityError& e) {
    perron_error_ = e.what();
  }
}

void DimGroup::check(const DgElement& g) const {
  d_.require_level(g.level);
  if (g.vector.size() != d_.vertex_count(g.level)) {
    throw PreconditionError("element at level " + std::to_string(g.level) + " needs " +
                            std::to_string(d_.vertex_count(g.level)) + " coordinates, got " +
                            std::to_string(g.vector.size()));
  }
}

DgElement DimGroup::push(const DgElement& g, std::size_t to) const {
  check(g);
  if (to < g.level) throw PreconditionError("cannot push to a lower level");
  d_.require_level(to);
  DgElement out = g;
  for (std::size_t n = g.level; n < to; ++n) {
    const EdgeTable& t = d_.table(n);
    IntVector next(t.size());
    for (std::size_t v = 0; v < t.size(); ++v)
      for (std::size_t s : t[v]) next[v] += out.vector[s];
    out.vector = std::move(next);
  }
  out.level = to;
  return out;
}

ZeroVerdict DimGroup::is_zero(const DgElement& g, std::size_t depth) const {
  check(g);
  if (all_zero(g.vector)) return {Ternary::Yes, g.level};
  if (d_.is_stationary()) {
    // Level 0 -> 1 is injective; afterwards ker A^k is stable from k = |V|.
    std::size_t base = std::max<std::size_t>(g.level, 1);
    DgElement x = push(g, base);
    for (std::size_t k = 0; k <= d_.vertex_count(1); ++k) {
      if (all_zero(x.vector)) return {Ternary::Yes, x.level};
      x = push(x, x.level + 1);
    }
    return {Ternary::No, base + d_.vertex_count(1)};
  }
  const std::size_t last = *d_.last_level();
  DgElement x = g;
  std::size_t steps = 0;
  while (x.level < last && steps < depth) {
    x = push(x, x.level + 1);
    ++steps;
    if (all_zero(x.vector)) return {Ternary::Yes, x.level};
  }
  return {Ternary::Unknown, steps};
}

DgElement DimGroup::difference(const DgElement& a, const DgElement& b) const {
  std::size_t level = std::max(a.level, b.level);
  DgElement pa = push(a, level), pb = push(b, level);
  return DgElement{level, pa.vector - pb.vector};
}

DgElement DimGroup::sum(const DgElement& a, const DgElement& b) const {
  std::size_t level = std::max(a.level, b.level);
  DgElement pa = push(a, level), pb = push(b, level);
  return DgElement{level, pa.vector + pb.vector};
}

ZeroVerdict DimGroup::equal(const DgElement& a, const DgElement& b, std::size_t depth) const {
  return is_zero(difference(a, b), depth);
}

PositivityVerdict DimGroup::is_positive(const DgElement& g, std::size_t depth) const {
  check(g);
  if (primitive_stationary_ && perron_) {
    TraceValue tv = trace_value(g);
    if (tv.sign == 0) {
      return is_zero(g, depth).verdict == Ternary::Yes ? PositivityVerdict{Positivity::Zero, g.level}
                                                       : PositivityVerdict{Positivity::NotComparable, g.level};
    }
    // A positive trace forces an eventually positive representative.
    DgElement x = g;
    for (;;) {
      if (tv.sign > 0 ? all_nonnegative(x.vector) : all_nonpositive(x.vector)) {
        return {tv.sign > 0 ? Positivity::Positive : Positivity::Negative, x.level};
      }
      x = push(x, x.level + 1);
    }
  }
  DgElement x = g;
  std::size_t steps = 0;
  const auto last = d_.last_level();
  for (;;) {
    if (all_zero(x.vector)) return {Positivity::Zero, x.level};
    if (all_nonnegative(x.vector)) return {Positivity::Positive, x.level};
    if (all_nonpositive(x.vector)) return {Positivity::Negative, x.level};
    if (steps >= depth || (last && x.level >= *last)) break;
    x = push(x, x.level + 1);
    ++steps;
  }
  return {Positivity::Unknown, steps};
}

const PerronData& DimGroup::perron_data() const {
  if (!d_.is_stationary()) throw PreconditionError("trace data needs a stationary diagram");
  if (!primitive_stationary_) throw PreconditionError("trace data needs a primitive diagram");
  if (!perron_) throw CapabilityError(perron_error_);
  return *perron_;
}

TraceValue DimGroup::trace_value(const DgElement& g) const {
  const PerronData& pd = perron_data();
  const NumberField& f = pd.field;
  DgElement x = g.level == 0 ? push(g, 1) : g;
  check(x);
  Poly pairing;
  for (std::size_t i = 0; i < x.vector.size(); ++i) pairing = pairing + pd.left[i] * Rational(x.vector[i]);
  Poly value = f.mul(f.reduce(pairing), pd.normalization);
  if (x.level > 1) {
    Poly inv_lambda = f.inverse(f.generator());
    Poly scale = Poly::constant(1);
    for (std::size_t k = 1; k < x.level; ++k) scale = f.mul(scale, inv_lambda);
    value = f.mul(value, scale);
  }
  TraceValue tv;
  tv.value = value;
  tv.sign = f.sign(value);
  auto [lo, hi] = f.enclose(value, Rational(1, BigInt(1) << 40));
  tv.lo = lo;
  tv.hi = hi;
  return tv;
}

std::vector<BigInt> DimGroup::gcd_chain(std::size_t up_to) const {
  std::vector<BigInt> out;
  for (std::size_t m = 1; m <= up_to; ++m) out.push_back(gcd_of(d_.heights(m)));
  return out;
}

std::optional<std::size_t> DimGroup::rational_rank() const {
  if (!d_.is_stationary()) return std::nullopt;
  const IntMatrix& a = d_.stationary_matrix();
  return a.power(a.rows()).rank();
}

}  // namespace bvk
