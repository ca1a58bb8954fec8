#include "fdipx/types.hpp"

#include <array>

namespace fdipx {

namespace {
constexpr std::array<const char*, kBranchKindCount> kKindNames = {
    "none", "cond", "uncond", "call", "ret", "ijmp", "icall",
};
}  // namespace

const char* to_string(BranchKind k) {
  const auto i = static_cast<std::size_t>(k);
  assert(i < kKindNames.size());
  return kKindNames[i];
}

std::optional<BranchKind> branch_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (name == kKindNames[i]) return static_cast<BranchKind>(i);
  return std::nullopt;
}

}  // namespace fdipx
