#pragma once

namespace dicore {

inline constexpr const char* kVersion = "0.1.0";

}
