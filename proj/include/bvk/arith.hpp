#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bvk {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<BigInt>;

BigInt gcd(const BigInt& a, const BigInt& b);
// gcd of all entries, 0 for an empty or all-zero vector.
BigInt gcd_of(const IntVector& v);
bool all_zero(const IntVector& v);
bool all_nonnegative(const IntVector& v);
bool all_nonpositive(const IntVector& v);
IntVector operator-(const IntVector& a, const IntVector& b);
IntVector operator+(const IntVector& a, const IntVector& b);
IntVector scaled(const IntVector& v, const BigInt& k);

// p-adic valuation of a nonzero integer.
unsigned valuation(BigInt n, const BigInt& p);

// Nonnegative remainder.
BigInt mod(const BigInt& a, const BigInt& m);

std::string to_string(const BigInt& n);
std::string to_string(const Rational& q);
std::string to_string(const IntVector& v);

// Checked narrowing used when cell counts are enumerated explicitly.
std::uint64_t to_u64(const BigInt& n, const char* what);
std::int64_t to_i64(const BigInt& n, const char* what);

// Prime factors (ascending, distinct) of |n| by trial division. Throws
// CapabilityError if a cofactor above the trial bound is not a probable prime.
std::vector<BigInt> prime_factors(BigInt n);
std::vector<unsigned> primes_up_to(unsigned bound);

// Dense integer matrix, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigInt& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const BigInt& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  IntMatrix operator*(const IntMatrix& rhs) const;
  IntVector operator*(const IntVector& v) const;
  bool operator==(const IntMatrix& rhs) const = default;

  IntMatrix transpose() const;
  IntVector column(std::size_t c) const;
  IntVector row(std::size_t r) const;
  bool is_nonnegative() const;
  bool is_strictly_positive() const;
  BigInt max_entry() const;
  // Rank over the rationals.
  std::size_t rank() const;
  BigInt determinant() const;
  IntMatrix power(std::size_t k) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

std::string to_string(const IntMatrix& m);

}  // namespace bvk
