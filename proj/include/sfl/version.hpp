#pragma once

namespace sfl {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

}  // namespace sfl
