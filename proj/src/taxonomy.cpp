#include "taxoforge/taxonomy.hpp"

#include <json.hpp>

#include "taxoforge/errors.hpp"
#include "taxoforge/http.hpp"

namespace taxoforge {
namespace {

using nlohmann::json;

TaxonRecord record_from_json(const json& j, std::optional<long long> parent) {
    TaxonRecord rec;
    try {
        rec.key = j.at("key").get<long long>();
        rec.scientific_name = j.at("scientificName").get<std::string>();
        auto r = parse_rank(j.at("rank").get<std::string>());
        if (!r) throw DecodeError("unknown rank in API response");
        rec.rank = *r;
    } catch (const json::exception& e) {
        throw DecodeError(std::string("malformed taxon record: ") + e.what());
    }
    rec.parent_key = parent;
    return rec;
}

}  // namespace

std::string_view living_status_name(LivingStatus s) {
    switch (s) {
        case LivingStatus::Alive: return "ALIVE";
        case LivingStatus::Extinct: return "EXTINCT";
        default: return "UNKNOWN";
    }
}

LivingStatus weigh_status_votes(const std::vector<std::optional<bool>>& extinct_flags) {
    int extinct = 0, alive = 0;
    for (const auto& f : extinct_flags) {
        if (!f.has_value()) continue;
        (*f ? extinct : alive)++;
    }
    if (alive > extinct) return LivingStatus::Alive;
    if (extinct >= 1) return LivingStatus::Extinct;
    return LivingStatus::Unknown;
}

std::vector<TaxonRecord> TaxonomyClient::fetch_children(long long taxon_key) const {
    std::vector<TaxonRecord> out;
    long long offset = 0;
    for (;;) {
        const std::string url = api_base_ + std::to_string(taxon_key) +
                                "/children?limit=" + std::to_string(page_limit_) +
                                "&offset=" + std::to_string(offset);
        json page;
        try {
            page = json::parse(download_text(url, policy_));
        } catch (const json::parse_error& e) {
            throw DecodeError(std::string("malformed children page: ") + e.what());
        }
        try {
            for (const auto& item : page.at("results"))
                out.push_back(record_from_json(item, taxon_key));
            if (page.at("endOfRecords").get<bool>()) break;
            offset += page.at("limit").get<long long>();
        } catch (const json::exception& e) {
            throw DecodeError(std::string("malformed children page: ") + e.what());
        }
    }
    return out;
}

std::vector<SpeciesEntry> TaxonomyClient::collect_species(long long root_key, Rank leaf_rank,
                                                          Rank group_rank,
                                                          const std::string& root_group) const {
    std::vector<SpeciesEntry> out;

    // The root record itself is fetched once so a degenerate leaf root is
    // detected rather than silently skipped.
    {
        json j;
        try {
            j = json::parse(download_text(api_base_ + std::to_string(root_key), policy_));
        } catch (const json::parse_error& e) {
            throw DecodeError(std::string("malformed taxon record: ") + e.what());
        }
        TaxonRecord root = record_from_json(j, std::nullopt);
        if (root.rank == leaf_rank) {
            if (root_group.empty()) throw GroupMissing(root.key);
            return {{root.key, root.scientific_name, root_group, LivingStatus::Unknown}};
        }
    }

    // Explicit stack, children pushed in reverse so emission order matches
    // recursive depth-first order.
    struct Frame {
        TaxonRecord rec;
        std::string group;
    };
    std::vector<Frame> stack;
    {
        auto children = fetch_children(root_key);
        for (auto it = children.rbegin(); it != children.rend(); ++it)
            stack.push_back({*it, root_group});
    }

    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();

        std::string group = f.group;
        if (f.rec.rank == group_rank) group = f.rec.scientific_name;

        if (f.rec.rank == leaf_rank) {
            if (group.empty()) throw GroupMissing(f.rec.key);
            out.push_back({f.rec.key, f.rec.scientific_name, group, LivingStatus::Unknown});
            continue;  // leaves are not descended into
        }

        auto children = fetch_children(f.rec.key);
        for (auto it = children.rbegin(); it != children.rend(); ++it)
            stack.push_back({*it, group});
    }
    return out;
}

LivingStatus TaxonomyClient::resolve_status(long long species_key) const {
    const std::string url = api_base_ + std::to_string(species_key) + "/speciesProfiles";
    json j;
    try {
        j = json::parse(download_text(url, policy_));
    } catch (const json::parse_error& e) {
        throw DecodeError(std::string("malformed speciesProfiles: ") + e.what());
    }
    std::vector<std::optional<bool>> votes;
    if (j.contains("results")) {
        for (const auto& src : j.at("results")) {
            if (src.contains("extinct") && src.at("extinct").is_boolean())
                votes.push_back(src.at("extinct").get<bool>());
            else
                votes.push_back(std::nullopt);
        }
    }
    return weigh_status_votes(votes);
}

}  // namespace taxoforge
