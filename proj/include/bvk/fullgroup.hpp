#pragma once

#include "bvk/bratteli.hpp"
#include "bvk/errors.hpp"

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace bvk {

// Partitions p and q of {1..n} and a block map p[i] -> q[pi[i]] with equal
// block sizes.
struct BlockBijection {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> p;
  std::vector<std::vector<std::size_t>> q;
  std::vector<std::size_t> pi;
};

constexpr std::size_t kMaxBlocks = 20;

// Throws PreconditionError unless p, q partition {1..n} and sizes match.
void check_block_bijection(const BlockBijection& b);

// Empty when no non-empty proper union of blocks is mapped onto itself;
// otherwise the lexicographically least such family (indices into p).
std::optional<std::vector<std::size_t>> block_condition_violation(const BlockBijection& b);

class BlockConditionError : public PreconditionError {
 public:
  BlockConditionError(const std::string& what, std::vector<std::size_t> family)
      : PreconditionError(what), family_(std::move(family)) {}
  const std::vector<std::size_t>& family() const { return family_; }

 private:
  std::vector<std::size_t> family_;
};

// sigma[i-1] = σ(i): a single n-cycle with σ(U) = π(U) for every block.
std::vector<std::size_t> cyclic_from_blocks(const BlockBijection& b);
std::string cycle_notation(const std::vector<std::size_t>& sigma);
std::size_t cycle_count(const std::vector<std::size_t>& sigma);

// σ(x) = α^{r[w][j-1]}(x) on the level-`level` cell (w, j).
struct FullGroupElement {
  std::size_t level = 0;
  std::vector<std::vector<std::int64_t>> r;
  bool operator==(const FullGroupElement&) const = default;
};

nlohmann::json to_json(const FullGroupElement& s);
FullGroupElement full_group_element_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ClopenSet& u);
ClopenSet clopen_from_json(const nlohmann::json& j);

// α(U) as a clopen set, read off at the first level (at most `max_extra`
// below U's) where U contains either all or none of the roof cells.
ClopenSet alpha_image(const OrderedBratteliDiagram& d, const ClopenSet& u, std::size_t max_extra = 12);

struct ConjugatorFailure {
  enum class Stage { ClassMismatch, NoAdmissibleLevel, BlockCondition };
  Stage stage = Stage::ClassMismatch;
  std::size_t block = 0;
  std::size_t tower = 0;
  std::vector<std::size_t> family;
};

class ConjugatorError : public PreconditionError {
 public:
  ConjugatorError(const std::string& what, ConjugatorFailure f) : PreconditionError(what), failure_(std::move(f)) {}
  const ConjugatorFailure& failure() const { return failure_; }

 private:
  ConjugatorFailure failure_;
};

struct ConjugatorConstruction {
  FullGroupElement sigma;
  std::size_t block_level = 0;  // common level of the blocks and images
  std::size_t base_block = 0;
  std::vector<std::uint64_t> base_floor;  // j_w per tower at sigma.level
};

// σ ∈ [[α]] with σασ⁻¹(blocks[i]) = images[i]. Blocks and images are
// partitions of X with equal classes block by block.
ConjugatorConstruction conjugator_from_partition(const OrderedBratteliDiagram& d, const std::vector<ClopenSet>& blocks,
                                                 const std::vector<ClopenSet>& images, std::size_t lookahead_bound);

struct ConjugatorCheck {
  enum class Outcome { Ok, NotBijective, BlockMismatch, Inconclusive };
  Outcome outcome = Outcome::Inconclusive;
  std::size_t level = 0;  // level of the cells examined
  std::size_t block = 0;  // offending block for NotBijective / BlockMismatch
  std::optional<Cell> cell;
  std::size_t unresolved = 0;
  bool ok() const { return outcome == Outcome::Ok; }
};
std::string to_string(ConjugatorCheck::Outcome o);

ConjugatorCheck verify_conjugator(const OrderedBratteliDiagram& d, const FullGroupElement& s,
                                  const std::vector<ClopenSet>& blocks, const std::vector<ClopenSet>& images,
                                  std::size_t lookahead);

}  // namespace bvk
