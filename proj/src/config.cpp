#include "taxoforge/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "taxoforge/errors.hpp"

namespace taxoforge {
namespace {

using nlohmann::json;

Rank require_rank(const json& j, const std::string& key, Rank fallback) {
    if (!j.contains(key)) return fallback;
    const auto name = j.at(key).get<std::string>();
    auto r = parse_rank(name);
    if (!r) throw InvalidValue("unknown rank name: " + name);
    return *r;
}

bool absolute_url(const std::string& s) {
    return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

}  // namespace

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path.string());

    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        // nlohmann reports a byte offset; surface it along with the message,
        // which already carries line/column for text input.
        throw ParseError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config root must be a JSON object");

    Config cfg;

    if (j.contains("api_base"))
        cfg.api_base = j.at("api_base").get<std::string>();
    else if (j.contains("apiBase"))
        cfg.api_base = j.at("apiBase").get<std::string>();
    else
        throw MissingKey("api_base");
    if (!absolute_url(cfg.api_base)) throw InvalidValue("api_base must be an absolute URL");

    if (!j.contains("root_taxon")) throw MissingKey("root_taxon");
    cfg.root_taxon = j.at("root_taxon").get<long long>();

    if (!j.contains("dataset_root")) throw MissingKey("dataset_root");
    cfg.dataset_root = j.at("dataset_root").get<std::string>();

    cfg.group_rank = require_rank(j, "group_rank", Rank::Order);
    cfg.leaf_rank = require_rank(j, "leaf_rank", Rank::Species);

    if (j.contains("engines")) {
        for (const auto& e : j.at("engines")) {
            EngineSpec spec;
            spec.name = e.at("name").get<std::string>();
            spec.url_template = e.at("url_template").get<std::string>();
            spec.page_size = e.value("page_size", 20);
            if (spec.url_template.find("{query}") == std::string::npos ||
                spec.url_template.find("{offset}") == std::string::npos)
                throw InvalidValue("engine url_template must contain {query} and {offset}");
            cfg.engines.push_back(std::move(spec));
        }
    }

    cfg.max_dim = j.value("max_dim", 500);
    cfg.per_species_budget = j.value("per_species_budget", 20);
    cfg.positive_label = j.value("positive_label", std::string("bird"));
    cfg.accept_threshold = j.value("accept_threshold", 0.5);
    cfg.workers = j.value("workers", 4);
    cfg.seed = j.value("seed", std::uint64_t{0});

    if (j.contains("http")) {
        const auto& h = j.at("http");
        cfg.http.max_redirects = h.value("max_redirects", 5);
        cfg.http.retries_5xx = h.value("retries_5xx", 3);
        cfg.http.backoff_base_ms = h.value("backoff_base_ms", 250);
        cfg.http.timeout_ms = h.value("timeout_ms", 30000);
    }

    if (cfg.max_dim < 1) throw InvalidValue("max_dim must be >= 1");
    if (cfg.workers < 1) throw InvalidValue("workers must be >= 1");
    if (cfg.accept_threshold < 0.0 || cfg.accept_threshold > 1.0)
        throw InvalidValue("accept_threshold must be in [0,1]");
    if (cfg.per_species_budget < 0) throw InvalidValue("per_species_budget must be >= 0");
    if (cfg.http.max_redirects < 0 || cfg.http.retries_5xx < 0 ||
        cfg.http.backoff_base_ms < 0 || cfg.http.timeout_ms < 0)
        throw InvalidValue("http policy fields must be >= 0");

    return cfg;
}

std::string serialize_config(const Config& cfg) {
    json j;
    j["api_base"] = cfg.api_base;
    j["root_taxon"] = cfg.root_taxon;
    j["dataset_root"] = cfg.dataset_root;
    j["group_rank"] = std::string(rank_name(cfg.group_rank));
    j["leaf_rank"] = std::string(rank_name(cfg.leaf_rank));
    j["engines"] = json::array();
    for (const auto& e : cfg.engines) {
        j["engines"].push_back({{"name", e.name},
                                {"url_template", e.url_template},
                                {"page_size", e.page_size}});
    }
    j["max_dim"] = cfg.max_dim;
    j["per_species_budget"] = cfg.per_species_budget;
    j["positive_label"] = cfg.positive_label;
    j["accept_threshold"] = cfg.accept_threshold;
    j["workers"] = cfg.workers;
    j["seed"] = cfg.seed;
    j["http"] = {{"max_redirects", cfg.http.max_redirects},
                 {"retries_5xx", cfg.http.retries_5xx},
                 {"backoff_base_ms", cfg.http.backoff_base_ms},
                 {"timeout_ms", cfg.http.timeout_ms}};
    return j.dump(2);
}

}  // namespace taxoforge
