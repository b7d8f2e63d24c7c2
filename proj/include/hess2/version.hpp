#pragma once

namespace hess2 {
inline constexpr const char* kVersion = "1.0.0";
}
