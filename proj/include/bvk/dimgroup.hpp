#pragma once

#include "bvk/bratteli.hpp"
#include "bvk/dg_element.hpp"
#include "bvk/number_field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bvk {

enum class Ternary { Yes, No, Unknown };
std::string to_string(Ternary t);

struct ZeroVerdict {
  Ternary verdict = Ternary::Unknown;
  std::size_t level = 0;  // level where the push vanished, or depth used
};

enum class Positivity { Positive, Zero, Negative, NotComparable, Unknown };
std::string to_string(Positivity p);

struct PositivityVerdict {
  Positivity verdict = Positivity::Unknown;
  // Positive/Negative: a level where the pushed representative (or its
  // negation) is coordinatewise nonnegative. Unknown: depth used.
  std::size_t level = 0;
};

struct PerronData {
  Poly charpoly;
  NumberField field;       // minimal polynomial and isolating interval of λ
  std::vector<Poly> left;  // left eigenvector, entries in Q(λ), all positive
  Poly normalization;      // 1 / <left, heights(1)>
};

// Trace of an element as an exact element of Q(λ).
struct TraceValue {
  Poly value;
  int sign = 0;
  Rational lo, hi;  // enclosure of the real value
};

class DimGroup {
 public:
  explicit DimGroup(OrderedBratteliDiagram d);

  const OrderedBratteliDiagram& diagram() const { return d_; }
  bool primitive_stationary() const { return primitive_stationary_; }

  DgElement unit(std::size_t level) const { return DgElement{level, d_.heights(level)}; }
  DgElement push(const DgElement& g, std::size_t to) const;

  ZeroVerdict is_zero(const DgElement& g, std::size_t depth) const;
  PositivityVerdict is_positive(const DgElement& g, std::size_t depth) const;
  ZeroVerdict equal(const DgElement& a, const DgElement& b, std::size_t depth) const;
  DgElement difference(const DgElement& a, const DgElement& b) const;
  DgElement sum(const DgElement& a, const DgElement& b) const;

  const PerronData& perron_data() const;
  TraceValue trace_value(const DgElement& g) const;

  std::vector<BigInt> gcd_chain(std::size_t up_to) const;
  // Rank of the limit group tensored with Q (stationary: rank of A^|V|).
  std::optional<std::size_t> rational_rank() const;

  static constexpr int kMaxFieldDegree = 8;

 private:
  void check(const DgElement& g) const;

  OrderedBratteliDiagram d_;
  bool primitive_stationary_ = false;
  std::optional<PerronData> perron_;
  std::string perron_error_;
};

}  // namespace bvk
