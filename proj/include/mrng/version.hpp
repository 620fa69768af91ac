#pragma once

namespace mrng {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mrng
