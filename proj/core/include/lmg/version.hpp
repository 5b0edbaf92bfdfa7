#pragma once

namespace lmg {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace lmg
