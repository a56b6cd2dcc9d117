#pragma once

namespace pcassoc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pcassoc
