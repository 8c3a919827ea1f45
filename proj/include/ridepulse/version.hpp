#pragma once

namespace ridepulse {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace ridepulse
