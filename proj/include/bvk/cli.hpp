#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bvk::cli {

// Exit statuses.
inline constexpr int kCompleted = 0;
inline constexpr int kInputError = 1;
inline constexpr int kCapabilityError = 2;

// `args` excludes the program name. Reports go to `out` (or --out for
// non-certifying commands), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bvk::cli
