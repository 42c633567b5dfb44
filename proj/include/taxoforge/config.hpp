#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "taxoforge/rank.hpp"

namespace taxoforge {

struct HttpPolicy {
    int max_redirects = 5;
    int retries_5xx = 3;
    int backoff_base_ms = 250;
    int timeout_ms = 30000;
};

struct EngineSpec {
    std::string name;
    std::string url_template;  // must contain {query} and {offset}
    int page_size = 20;
};

struct Config {
    std::string api_base;
    long long root_taxon = 0;
    Rank group_rank = Rank::Order;
    Rank leaf_rank = Rank::Species;
    std::vector<EngineSpec> engines;
    std::string dataset_root;
    int max_dim = 500;
    int per_species_budget = 20;
    std::string positive_label = "bird";
    double accept_threshold = 0.5;
    int workers = 4;
    std::uint64_t seed = 0;
    HttpPolicy http;
};

// Loads and validates; absent optional keys get their defaults. The paper's
// "apiBase" spelling is accepted as an alias for api_base.
Config load_config(const std::filesystem::path& path);

std::string serialize_config(const Config& cfg);

}  // namespace taxoforge
