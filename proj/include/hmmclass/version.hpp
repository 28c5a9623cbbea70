#pragma once

namespace hmmclass {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hmmclass
