#pragma once

namespace cavity {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cavity
