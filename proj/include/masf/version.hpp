#pragma once

namespace masf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace masf
