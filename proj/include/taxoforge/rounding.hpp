#pragma once

#include <cstdint>
#include <string>

namespace taxoforge {

// Ratio num/den scaled to hundredths, rounded half-up. All report percentages
// and averages go through this so results are identical across platforms.
inline std::int64_t ratio_hundredths(std::int64_t num, std::int64_t den) {
    const std::int64_t scaled = num * 100;
    return (2 * scaled + den) / (2 * den);
}

// Percent num/den in hundredths of a percent.
inline std::int64_t percent_hundredths(std::int64_t num, std::int64_t den) {
    return ratio_hundredths(num * 100, den);
}

inline std::string format_hundredths(std::int64_t h) {
    std::string s = std::to_string(h / 100) + ".";
    const std::int64_t frac = h % 100;
    if (frac < 10) s += '0';
    s += std::to_string(frac);
    return s;
}

}  // namespace taxoforge
