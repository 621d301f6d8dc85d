#pragma once

namespace elbm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace elbm
