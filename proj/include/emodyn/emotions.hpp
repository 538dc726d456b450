#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "emodyn/error.hpp"

namespace emodyn {

inline constexpr std::size_t kEmotionCount = 6;

/// Fixed emotion order used everywhere: files, reports, model columns.
inline constexpr std::array<const char*, kEmotionCount> kEmotionNames = {
    "anger", "disgust", "fear", "joy", "sadness", "surprise"};

/// Six real-valued intensities keyed by the basic-emotion taxonomy.
struct EmotionScores {
    std::array<double, kEmotionCount> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline std::size_t emotion_index(const std::string& name) {
    for (std::size_t i = 0; i < kEmotionCount; ++i)
        if (name == kEmotionNames[i]) return i;
    throw InputError("unknown emotion name: " + name);
}

}  // namespace emodyn
