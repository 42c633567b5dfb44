#pragma once

#include <cstdint>
#include <string>

namespace taxoforge {

struct Progress {
    std::uint64_t done = 0;
    std::uint64_t total = 0;
    std::uint64_t elapsed_ms = 0;
};

// "{label} {done}/{total} ({pct}%) elapsed={H:MM:SS} eta={H:MM:SS}".
// pct has two half-up decimals; eta extrapolates linearly and reads
// "--:--:--" until the first species completes.
std::string progress_line(const Progress& p, const std::string& label);

std::string format_hms(std::uint64_t ms);

}  // namespace taxoforge
