#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "ffcdnn/error.hpp"

namespace ffcdnn {

enum class StressClass : std::size_t { Healthy = 0, YellowRust = 1, NitrogenDeficiency = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<std::string_view, kNumClasses> kClassNames{"Healthy", "YellowRust", "NitrogenDeficiency"};

inline std::size_t index_of(StressClass c) { return static_cast<std::size_t>(c); }

inline std::string_view class_name(StressClass c) { return kClassNames[index_of(c)]; }

inline StressClass class_from_index(std::size_t i) {
    if (i >= kNumClasses) throw InvalidArgument("class index " + std::to_string(i) + " out of range");
    return static_cast<StressClass>(i);
}

inline StressClass parse_class(std::string_view name) {
    for (std::size_t i = 0; i < kNumClasses; ++i)
        if (kClassNames[i] == name) return static_cast<StressClass>(i);
    throw InvalidArgument("unknown class '" + std::string(name) + "'");
}

} // namespace ffcdnn
