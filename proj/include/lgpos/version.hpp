#pragma once

namespace lgpos {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lgpos
