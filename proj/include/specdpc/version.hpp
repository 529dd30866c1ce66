#pragma once

namespace specdpc {
inline constexpr const char* kVersion = "0.1.0";
}
