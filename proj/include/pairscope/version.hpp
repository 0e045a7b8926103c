#pragma once

namespace pairscope {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pairscope
