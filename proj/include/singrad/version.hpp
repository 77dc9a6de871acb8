#pragma once

namespace singrad {

inline constexpr const char* kVersion = "1.0.0";

} // namespace singrad
