#pragma once

#include "bvk/fullgroup.hpp"
#include "bvk/invariants.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bvk {

// Least N with every n >= N in N k_1 + ... + N k_r (at least 1).
std::uint64_t frobenius(const std::vector<std::uint64_t>& k);
// Lexicographically least nonnegative coefficients with sum N_j k_j = d.
std::optional<std::vector<std::uint64_t>> represent(std::uint64_t d, const std::vector<std::uint64_t>& k);

struct ClassifyBounds {
  std::size_t depth = 40;
  std::size_t max_level = 12;
  unsigned prime_cutoff = 97;
  std::size_t ladder_span = 12;
  SpectrumBounds spectrum() const { return {prime_cutoff, 20, depth}; }
};

// T with T * heightsA(level_a) = heightsB(level_b), T >= 0.
struct K0Morphism {
  std::size_t level_a = 0;
  std::size_t level_b = 0;
  IntMatrix t;
  BigInt p;
  bool operator==(const K0Morphism&) const = default;
};

struct K0MorphismResult {
  enum class Status { Ok, Obstruction, Exhausted };
  Status status = Status::Exhausted;
  K0Morphism morphism;
  BigInt obstruction;  // p with p not dividing the unit of B
  std::optional<ResidueCycle> certificate;
};

// Pushes B from `level_b` until a unit-preserving positive map exists.
K0MorphismResult build_k0_morphism(const DimGroup& a, std::size_t level_a, const DimGroup& b, std::size_t level_b,
                                   const ClassifyBounds& bounds = {});
bool verify_k0_morphism(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b, const K0Morphism& m);

enum class Verdict { Yes, No, Unknown };
std::string to_string(Verdict v);

struct WeakResult {
  Verdict verdict = Verdict::Unknown;
  BigInt witness;
  bool witness_in_first = false;
  // A->B, B->A, A->B, ... at increasing levels.
  std::vector<K0Morphism> schedule;
  SpectraComparison spectra;
};
WeakResult decide_weak(const DimGroup& a, const DimGroup& b, const ClassifyBounds& bounds = {});
// Schedule alternates direction and every level strictly increases per side.
bool verify_schedule(const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b,
                     const std::vector<K0Morphism>& schedule);

// Matrices h_i: Z^{V_A(a_i)} -> Z^{V_B(b_i)} and H_i: Z^{V_B(b_i)} -> Z^{V_A(a_{i+1})}.
struct IntertwiningLadder {
  std::vector<std::size_t> levels_a;
  std::vector<std::size_t> levels_b;
  std::vector<IntMatrix> h;
  std::vector<IntMatrix> big_h;
  bool operator==(const IntertwiningLadder&) const = default;
};

struct LadderCheck {
  bool ok = false;
  std::size_t broken = 0;  // index of the first failing condition
  std::string reason;
};
// Squares are numbered in order: H_0 h_0, h_1 H_0, H_1 h_1, ...; unit and
// positivity failures are reported against the matrix's own square index.
LadderCheck verify_ladder(const IntertwiningLadder& l, const OrderedBratteliDiagram& a,
                          const OrderedBratteliDiagram& b);
// A one-period ladder between stationary diagrams with h_1 = h_0 repeats
// forever; that is what makes it a certificate of isomorphism.
bool ladder_is_periodic(const IntertwiningLadder& l, const OrderedBratteliDiagram& a, const OrderedBratteliDiagram& b);

struct Obstruction {
  enum class Kind { Spectra, RationalRank, TraceImage };
  Kind kind = Kind::Spectra;
  std::string detail;
  BigInt witness;  // spectra: the separating divisor
};
std::string to_string(Obstruction::Kind k);

struct KConjugacyResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<IntertwiningLadder> ladder;
  std::vector<Obstruction> obstructions;
  std::size_t searched_span = 0;
};
KConjugacyResult decide_k_conjugacy(const DimGroup& a, const DimGroup& b, const ClassifyBounds& bounds = {});

struct TauResult {
  Verdict verdict = Verdict::Unknown;
  SpectraComparison spectra;
  Ternary trace_images = Ternary::Unknown;
  std::vector<Obstruction> obstructions;
};
TauResult decide_tau(const DimGroup& a, const DimGroup& b, const ClassifyBounds& bounds = {});

// Cells of U with class x: the lowest r(w) floors of U in each tower, at
// the first level where 0 <= r <= counts(U).
ClopenSet lift_class_under(const DimGroup& g, const ClopenSet& u, const DgElement& x, std::size_t depth);
// Disjoint clopen sets with the given classes, covering X.
std::vector<ClopenSet> partition_from_classes(const DimGroup& g, const std::vector<DgElement>& xs, std::size_t depth);

struct PartitionHomeomorphism {
  std::vector<ClopenSet> source;
  std::vector<ClopenSet> target;  // empty set for a zero image
  bool invertible = true;
};
PartitionHomeomorphism partition_homeomorphism_from_hom(const DimGroup& a, const std::vector<ClopenSet>& blocks,
                                                        const DimGroup& b, const std::vector<DgElement>& images,
                                                        std::size_t depth);

struct BezoutLift {
  BigInt p;
  std::vector<BigInt> k;
  std::vector<BigInt> n;  // sum k_i n_i = 1
  DgElement f0;           // p * f0 = unit
  std::vector<DgElement> h;  // images of the basis vectors
};
// h: Z^r -> target with h(f1) = unit, built from preimages g_i (zero when
// omitted). Throws PreconditionError when gcd(f1) does not divide the unit.
BezoutLift bezout_lift(const IntVector& f1, const DimGroup& target, std::vector<DgElement> preimages,
                       std::size_t depth);

struct ResolutionReport {
  PartitionHomeomorphism sigma;
  K0Morphism morphism;
  std::vector<ClopenSet> blocks;  // on B: σ of the level-m A blocks
  std::vector<ClopenSet> images;  // on B: σ of their α-images
  ConjugatorConstruction corrector;
  ConjugatorCheck check;
  bool classes_agree = false;
};
class StageError : public PreconditionError {
 public:
  StageError(const std::string& stage, const std::string& what) : PreconditionError(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};
ResolutionReport conjugate_at_resolution(const OrderedBratteliDiagram& da, const OrderedBratteliDiagram& db,
                                         std::size_t m, const ClassifyBounds& bounds = {});

}  // namespace bvk
