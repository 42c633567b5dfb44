#include "taxoforge/crawler.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <iostream>
#include <mutex>
#include <thread>

#include "taxoforge/errors.hpp"
#include "taxoforge/html.hpp"
#include "taxoforge/http.hpp"
#include "taxoforge/imaging.hpp"
#include "taxoforge/layout.hpp"
#include "taxoforge/progress.hpp"

namespace taxoforge {
namespace {

std::string percent_encode(const std::string& s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
            c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else if (c == ' ') {
            out.push_back('+');
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

void substitute(std::string& tmpl, const std::string& key, const std::string& value) {
    size_t pos;
    while ((pos = tmpl.find(key)) != std::string::npos) tmpl.replace(pos, key.size(), value);
}

}  // namespace

std::string engine_page_url(const EngineSpec& engine, const std::string& query,
                            long long offset) {
    std::string url = engine.url_template;
    substitute(url, "{query}", percent_encode(query));
    substitute(url, "{offset}", std::to_string(offset));
    return url;
}

CrawlReport crawl_species(const CrawlJob& job, const std::vector<EngineSpec>& engines,
                          const HttpPolicy& policy, const Sink& sink) {
    CrawlReport report;
    int budget = job.budget;

    for (const auto& engine : engines) {
        long long offset = 0;
        while (budget > 0) {
            const std::string page_url =
                engine_page_url(engine, job.entry.species_name, offset);
            std::string page;
            try {
                page = download_text(page_url, policy);
            } catch (const Error& e) {
                std::cerr << "engine " << engine.name << " page failed: " << e.what()
                          << std::endl;
                break;
            }
            auto candidates = parse_image_urls(page, page_url);
            if (candidates.empty()) break;  // engine drained

            for (const auto& url : candidates) {
                if (budget <= 0) break;
                --budget;
                report.attempted++;
                switch (sink(url, job.entry)) {
                    case SinkOutcome::Accepted: report.accepted++; break;
                    case SinkOutcome::Rejected: report.rejected++; break;
                    case SinkOutcome::Duplicate: report.duplicates++; break;
                    case SinkOutcome::Error: report.errors++; break;
                }
            }
            offset += engine.page_size;
        }
        if (budget <= 0) break;
    }
    return report;
}

Sink make_pipeline_sink(StateStore& store, ClassifierBackend& backend,
                        const std::filesystem::path& dataset_root, int max_dim,
                        std::string positive_label, double threshold,
                        HttpPolicy policy) {
    return [&store, &backend, dataset_root, max_dim,
            positive_label = std::move(positive_label), threshold,
            policy](const std::string& url, const SpeciesEntry& entry) -> SinkOutcome {
        if (!store.register_url(url)) return SinkOutcome::Duplicate;

        std::vector<std::uint8_t> body;
        try {
            body = download(url, policy);
        } catch (const Error& e) {
            std::cerr << "download failed: " << e.what() << std::endl;
            return SinkOutcome::Error;
        }

        std::vector<std::uint8_t> jpeg;
        std::uint64_t hash;
        try {
            jpeg = normalize(body, max_dim);
            hash = average_hash(decode_image(std::span(jpeg)));
        } catch (const Unconvertible&) {
            return SinkOutcome::Rejected;
        } catch (const DecodeError&) {
            return SinkOutcome::Rejected;
        }

        if (!store.register_hash(hash)) return SinkOutcome::Duplicate;

        // The classifier protocol wants a file path; park the candidate in a
        // scratch file until the verdict is in.
        std::error_code ec;
        const auto tmp_dir = dataset_root / ".tmp";
        std::filesystem::create_directories(tmp_dir, ec);
        std::ostringstream name;
        name << std::this_thread::get_id() << "_" << hash_hex(hash) << ".jpg";
        const auto tmp = tmp_dir / name.str();
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(jpeg.data()),
                      static_cast<std::streamsize>(jpeg.size()));
            if (!out) return SinkOutcome::Error;
        }

        bool keep = false;
        try {
            keep = accept(backend.classify(tmp), positive_label, threshold);
        } catch (const BackendFailure& e) {
            std::cerr << "classifier failed: " << e.what() << std::endl;
        }
        std::filesystem::remove(tmp, ec);
        if (!keep) return SinkOutcome::Rejected;

        try {
            store_image(dataset_root, entry.group_name, jpeg, hash, url);
        } catch (const Error& e) {
            std::cerr << "store failed: " << e.what() << std::endl;
            return SinkOutcome::Error;
        }
        return SinkOutcome::Accepted;
    };
}

CrawlReport run_crawl(const Config& cfg, StateStore& store, ClassifierBackend& backend,
                      const std::vector<SpeciesEntry>& species,
                      const std::function<bool()>& stop) {
    for (const auto& e : species) store.put_species(e);
    store.checkpoint();

    // Work list: everything not already done and not confirmed extinct.
    const auto snap = store.snapshot();
    std::vector<SpeciesEntry> todo;
    std::uint64_t already_done = 0;
    for (const auto& e : species) {
        auto it = snap.species.find(e.species_key);
        if (it != snap.species.end() && it->second.done) {
            already_done++;
            continue;
        }
        if (e.status == LivingStatus::Extinct) continue;
        todo.push_back(e);
    }

    Sink sink = make_pipeline_sink(store, backend, cfg.dataset_root, cfg.max_dim,
                                   cfg.positive_label, cfg.accept_threshold, cfg.http);

    const std::uint64_t total = already_done + todo.size();
    std::atomic<size_t> next{0};
    std::atomic<std::uint64_t> completed{already_done};
    std::mutex report_mu;
    CrawlReport report;
    const auto started = std::chrono::steady_clock::now();

    auto elapsed_ms = [&] {
        return static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started)
                .count());
    };
    auto log_progress = [&] {
        Progress p{completed.load(), total, elapsed_ms()};
        std::cerr << progress_line(p, "crawl") << std::endl;
    };

    auto worker = [&] {
        for (;;) {
            if (stop && stop()) return;
            const size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;

            CrawlJob job{todo[i], cfg.per_species_budget};
            CrawlReport r = crawl_species(job, cfg.engines, cfg.http, sink);
            {
                std::lock_guard lock(report_mu);
                report += r;
            }
            store.mark_done(job.entry.species_key);
            store.checkpoint();
            completed.fetch_add(1);
            log_progress();
        }
    };

    // Periodic progress ticker alongside the per-species lines.
    std::mutex tick_mu;
    std::condition_variable tick_cv;
    bool finished = false;
    std::thread ticker([&] {
        std::unique_lock lock(tick_mu);
        while (!tick_cv.wait_for(lock, std::chrono::seconds(10), [&] { return finished; }))
            log_progress();
    });

    std::vector<std::thread> pool;
    const int n = std::max(1, cfg.workers);
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    {
        std::lock_guard lock(tick_mu);
        finished = true;
    }
    tick_cv.notify_all();
    ticker.join();

    store.checkpoint();
    return report;
}

}  // namespace taxoforge
