#pragma once

#include "bvk/arith.hpp"

namespace bvk {

// Representative of an element of the limit group: a vector over V_level.
struct DgElement {
  std::size_t level = 0;
  IntVector vector;
  bool operator==(const DgElement&) const = default;
};

}  // namespace bvk
