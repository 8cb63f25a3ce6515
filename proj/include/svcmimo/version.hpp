#pragma once

namespace svcmimo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace svcmimo
