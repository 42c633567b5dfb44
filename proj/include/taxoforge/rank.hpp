#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace taxoforge {

// Ordered coarse-to-fine; comparison by underlying value gives depth.
enum class Rank {
    Domain,
    Kingdom,
    Phylum,
    Class,
    Order,
    Family,
    Genus,
    Species,
};

inline constexpr std::array<std::string_view, 8> kRankNames = {
    "DOMAIN", "KINGDOM", "PHYLUM", "CLASS", "ORDER", "FAMILY", "GENUS", "SPECIES"};

inline std::string_view rank_name(Rank r) {
    return kRankNames[static_cast<int>(r)];
}

inline std::optional<Rank> parse_rank(std::string_view name) {
    std::string upper(name);
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (int i = 0; i < static_cast<int>(kRankNames.size()); ++i) {
        if (upper == kRankNames[i]) return static_cast<Rank>(i);
    }
    return std::nullopt;
}

inline bool coarser_than(Rank a, Rank b) {
    return static_cast<int>(a) < static_cast<int>(b);
}

}  // namespace taxoforge
