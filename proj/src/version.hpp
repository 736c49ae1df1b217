#pragma once

namespace fou2 {
inline constexpr const char* kFou2kitVersion = "0.1.0";
}
