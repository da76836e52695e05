#include "bvk/arith.hpp"

#include "bvk/errors.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <sstream>

namespace bvk {

BigInt gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

BigInt gcd_of(const IntVector& v) {
  BigInt g = 0;
  for (const auto& x : v) {
    g = gcd(g, x);
    if (g == 1) break;
  }
  return abs(g);
}

bool all_zero(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x == 0; });
}

bool all_nonnegative(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x >= 0; });
}

bool all_nonpositive(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return x <= 0; });
}

IntVector operator-(const IntVector& a, const IntVector& b) {
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

IntVector operator+(const IntVector& a, const IntVector& b) {
  IntVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

IntVector scaled(const IntVector& v, const BigInt& k) {
  IntVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * k;
  return out;
}

unsigned valuation(BigInt n, const BigInt& p) {
  unsigned v = 0;
  n = abs(n);
  if (n == 0) return 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

BigInt mod(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

std::string to_string(const BigInt& n) { return n.str(); }

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::string to_string(const IntVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].str();
  }
  return s + ")";
}

std::uint64_t to_u64(const BigInt& n, const char* what) {
  if (n < 0 || n > BigInt(std::numeric_limits<std::uint64_t>::max() / 4)) {
    throw CapabilityError(std::string(what) + " too large to enumerate: " + n.str());
  }
  return static_cast<std::uint64_t>(n);
}

std::int64_t to_i64(const BigInt& n, const char* what) {
  if (n > BigInt(std::numeric_limits<std::int64_t>::max()) ||
      n < BigInt(std::numeric_limits<std::int64_t>::min())) {
    throw CapabilityError(std::string(what) + " does not fit in 64 bits: " + n.str());
  }
  return static_cast<std::int64_t>(n);
}

std::vector<BigInt> prime_factors(BigInt n) {
  constexpr unsigned kTrialBound = 1000000;
  std::vector<BigInt> out;
  n = abs(n);
  if (n < 2) return out;
  for (unsigned d = 2; d <= kTrialBound && BigInt(d) * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d == 0) {
      out.emplace_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) {
    if (n > BigInt(kTrialBound) * kTrialBound && !boost::multiprecision::miller_rabin_test(n, 40)) {
      throw CapabilityError("cannot factor " + n.str() + " by trial division");
    }
    out.push_back(n);
  }
  return out;
}

std::vector<unsigned> primes_up_to(unsigned bound) {
  std::vector<bool> composite(bound + 1, false);
  std::vector<unsigned> out;
  for (unsigned i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (unsigned long long j = static_cast<unsigned long long>(i) * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  IntMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

IntVector IntMatrix::operator*(const IntVector& v) const {
  IntVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) out[i] += (*this)(i, k) * v[k];
  }
  return out;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

IntVector IntMatrix::column(std::size_t c) const {
  IntVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, c);
  return out;
}

IntVector IntMatrix::row(std::size_t r) const {
  return IntVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                   data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

bool IntMatrix::is_nonnegative() const {
  return std::all_of(data_.begin(), data_.end(), [](const BigInt& x) { return x >= 0; });
}

bool IntMatrix::is_strictly_positive() const {
  return std::all_of(data_.begin(), data_.end(), [](const BigInt& x) { return x > 0; });
}

BigInt IntMatrix::max_entry() const {
  BigInt m = 0;
  for (const auto& x : data_) m = std::max(m, x);
  return m;
}

std::size_t IntMatrix::rank() const {
  std::vector<std::vector<Rational>> a(rows_, std::vector<Rational>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) a[i][j] = Rational((*this)(i, j));
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows_ && a[pivot][c] == 0) ++pivot;
    if (pivot == rows_) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t r = rank + 1; r < rows_; ++r) {
      if (a[r][c] == 0) continue;
      Rational f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k < cols_; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  return rank;
}

BigInt IntMatrix::determinant() const {
  // Bareiss fraction-free elimination.
  const std::size_t n = rows_;
  if (n == 0) return 1;
  std::vector<std::vector<BigInt>> a(n, std::vector<BigInt>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = (*this)(i, j);
  BigInt prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && a[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(a[s], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

IntMatrix IntMatrix::power(std::size_t k) const {
  IntMatrix result = identity(rows_);
  IntMatrix base = *this;
  while (k) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

std::string to_string(const IntMatrix& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) os << ",";
    os << "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << m(i, j);
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

}  // namespace bvk
