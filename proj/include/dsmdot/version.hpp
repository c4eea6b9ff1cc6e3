#pragma once

namespace dsmdot {
inline constexpr const char* kVersion = "dsmdot 0.1.0";
}
