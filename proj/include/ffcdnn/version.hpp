#pragma once

namespace ffcdnn {

inline constexpr const char* kVersion = "0.9.0";

} // namespace ffcdnn
