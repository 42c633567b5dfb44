#include "taxoforge/progress.hpp"

#include <cstdio>

#include "taxoforge/rounding.hpp"

namespace taxoforge {

std::string format_hms(std::uint64_t ms) {
    const std::uint64_t s = ms / 1000;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%llu:%02llu:%02llu",
                  static_cast<unsigned long long>(s / 3600),
                  static_cast<unsigned long long>((s / 60) % 60),
                  static_cast<unsigned long long>(s % 60));
    return buf;
}

std::string progress_line(const Progress& p, const std::string& label) {
    const std::int64_t pct =
        p.total == 0 ? 0
                     : percent_hundredths(static_cast<std::int64_t>(p.done),
                                          static_cast<std::int64_t>(p.total));
    std::string eta = "--:--:--";
    if (p.done > 0) eta = format_hms(p.elapsed_ms * (p.total - p.done) / p.done);

    return label + " " + std::to_string(p.done) + "/" + std::to_string(p.total) + " (" +
           format_hundredths(pct) + "%) elapsed=" + format_hms(p.elapsed_ms) +
           " eta=" + eta;
}

}  // namespace taxoforge
