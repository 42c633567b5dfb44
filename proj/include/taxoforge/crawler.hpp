#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "taxoforge/config.hpp"
#include "taxoforge/filter.hpp"
#include "taxoforge/store.hpp"
#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

struct CrawlJob {
    SpeciesEntry entry;
    int budget = 0;
};

struct CrawlReport {
    std::uint64_t attempted = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t errors = 0;

    CrawlReport& operator+=(const CrawlReport& o) {
        attempted += o.attempted;
        accepted += o.accepted;
        rejected += o.rejected;
        duplicates += o.duplicates;
        errors += o.errors;
        return *this;
    }
};

enum class SinkOutcome { Accepted, Rejected, Duplicate, Error };

// Receives each candidate image URL exactly once.
using Sink = std::function<SinkOutcome(const std::string& url, const SpeciesEntry& entry)>;

// Expand one engine query page URL: {query} and {offset} substituted,
// query percent-encoded.
std::string engine_page_url(const EngineSpec& engine, const std::string& query,
                            long long offset);

// Feeder/parser stage: page through the engines in order, hand every
// candidate URL to the sink until the budget runs out. Page fetch failures
// are logged and skipped.
CrawlReport crawl_species(const CrawlJob& job, const std::vector<EngineSpec>& engines,
                          const HttpPolicy& policy, const Sink& sink);

// The composed downloader stage: URL dedup, download, normalize, hash dedup,
// classifier gate, store. Safe to call from multiple workers.
Sink make_pipeline_sink(StateStore& store, ClassifierBackend& backend,
                        const std::filesystem::path& dataset_root, int max_dim,
                        std::string positive_label, double threshold,
                        HttpPolicy policy);

// Worker-pool orchestration over all not-yet-done, non-extinct species.
// stop() is polled between species; the crawl checkpoints after every
// completed species and once more before returning. Resumable: finished
// species are never re-attempted.
CrawlReport run_crawl(const Config& cfg, StateStore& store, ClassifierBackend& backend,
                      const std::vector<SpeciesEntry>& species,
                      const std::function<bool()>& stop = {});

}  // namespace taxoforge
