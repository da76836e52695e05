#pragma once

#include "bvk/dimgroup.hpp"

#include <optional>
#include <vector>

namespace bvk {

// Heights mod n repeat from level `start` with period `period`, and no level
// before start + period has every entry divisible by n.
struct ResidueCycle {
  BigInt n;
  std::size_t start = 0;
  std::size_t period = 0;
};

struct DividesVerdict {
  Ternary verdict = Ternary::Unknown;
  std::size_t level = 0;  // Yes: witness level; Unknown: depth used
  std::optional<ResidueCycle> certificate;
};

DividesVerdict divides_unit(const DimGroup& g, const BigInt& n, std::size_t depth);
bool verify_residue_cycle(const OrderedBratteliDiagram& d, const ResidueCycle& c);

enum class ValuationKind { Exact, AtLeast, Infinity };
std::string to_string(ValuationKind k);

// Exact: heights(level) has p-content `value`, and the orbit of
// heights(level)/p^value under A mod p enters a cycle (after `preperiod`
// steps, of length `period`) without reaching zero.
// Infinity: sum_i annihilator[i] * heights(level + i) = 0 with a monic
// annihilator whose lower coefficients are all divisible by p.
struct ValuationCertificate {
  std::size_t level = 0;
  std::size_t preperiod = 0;
  std::size_t period = 0;
  IntVector annihilator;
};

struct PrimeValuation {
  BigInt p;
  ValuationKind kind = ValuationKind::Exact;
  unsigned value = 0;
  std::optional<ValuationCertificate> certificate;
};

struct SpectrumBounds {
  unsigned prime_cutoff = 97;
  unsigned valuation_cutoff = 20;
  std::size_t depth = 40;
};

// Per-prime valuations of the supernatural number of D(G,u); primes with
// valuation zero are omitted. `complete` means every prime is accounted for.
struct SupernaturalTruncation {
  std::vector<PrimeValuation> entries;
  SpectrumBounds bounds;
  std::size_t level_cutoff = 0;
  bool complete = false;

  const PrimeValuation* find(const BigInt& p) const;
};

SupernaturalTruncation periodic_spectrum(const DimGroup& g, const SpectrumBounds& bounds = {});
bool verify_valuation(const OrderedBratteliDiagram& d, const PrimeValuation& v);

struct SpectraComparison {
  enum class Verdict { Equal, Distinct, Unknown };
  Verdict verdict = Verdict::Unknown;
  BigInt witness;           // Distinct: least n in exactly one divisor set
  bool witness_in_first = false;
  SupernaturalTruncation first, second;
};
std::string to_string(SpectraComparison::Verdict v);

SpectraComparison spectra_equal(const DimGroup& a, const DimGroup& b, const SpectrumBounds& bounds = {});

// The image of the trace, a subgroup of R containing 1.
struct TraceImageGroup {
  enum class Kind { Rational, Field, Undetermined };
  Kind kind = Kind::Undetermined;
  // Rational: x is in the group iff its denominator divides this
  // supernatural number; nullopt marks an infinite exponent.
  std::vector<std::pair<BigInt, std::optional<unsigned>>> denominator;
  // Field: the group is N * union_k λ^-k L with L the lattice spanned by
  // `lattice` and λ acting on it by `lambda_action` (row j = λ * lattice[j]).
  NumberField field;
  Poly normalization;
  std::vector<Poly> lattice;
  IntMatrix lambda_action;
  std::vector<Poly> generators;  // 1 and the traces of the level-1 basis vectors
  std::vector<double> approximations;
  std::string note;
};

TraceImageGroup trace_image_group(const DimGroup& g);
// Membership of x (an element of the group's field) in a Field-kind group.
Ternary trace_image_contains(const TraceImageGroup& g, const Poly& x);
// Membership of a rational number.
Ternary trace_image_contains(const TraceImageGroup& g, const Rational& x);
Ternary trace_images_isomorphic(const TraceImageGroup& a, const TraceImageGroup& b);

// Integer basis (echelon rows) of the lattice spanned by the given rows.
std::vector<IntVector> lattice_basis(std::vector<IntVector> rows);

}  // namespace bvk
