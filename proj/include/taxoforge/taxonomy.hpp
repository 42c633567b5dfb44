#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taxoforge/config.hpp"
#include "taxoforge/rank.hpp"

namespace taxoforge {

struct TaxonRecord {
    long long key = 0;
    std::string scientific_name;
    Rank rank = Rank::Species;
    std::optional<long long> parent_key;
};

enum class LivingStatus { Alive, Extinct, Unknown };

std::string_view living_status_name(LivingStatus s);

struct SpeciesEntry {
    long long species_key = 0;
    std::string species_name;
    std::string group_name;
    LivingStatus status = LivingStatus::Unknown;
};

// Majority vote over profile sources; absent field abstains. Ties (and any
// extinct vote without a strict majority either way) resolve to Extinct,
// zero votes to Unknown.
LivingStatus weigh_status_votes(const std::vector<std::optional<bool>>& extinct_flags);

class TaxonomyClient {
public:
    TaxonomyClient(std::string api_base, HttpPolicy policy, int page_limit = 500)
        : api_base_(std::move(api_base)), policy_(policy), page_limit_(page_limit) {}

    // All children of taxon_key, paging until endOfRecords.
    std::vector<TaxonRecord> fetch_children(long long taxon_key) const;

    // Depth-first traversal emitting every leaf_rank node grouped under its
    // nearest group_rank ancestor on the path. root_group seeds the group for
    // paths above the first group_rank node (including a leaf root).
    std::vector<SpeciesEntry> collect_species(long long root_key, Rank leaf_rank,
                                              Rank group_rank,
                                              const std::string& root_group = {}) const;

    LivingStatus resolve_status(long long species_key) const;

private:
    std::string api_base_;
    HttpPolicy policy_;
    int page_limit_;
};

}  // namespace taxoforge
