#pragma once

namespace biodose {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace biodose
