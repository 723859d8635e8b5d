#pragma once

namespace pinlab {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace pinlab
