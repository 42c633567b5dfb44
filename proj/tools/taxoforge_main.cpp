#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "taxoforge/config.hpp"
#include "taxoforge/crawler.hpp"
#include "taxoforge/errors.hpp"
#include "taxoforge/eval.hpp"
#include "taxoforge/imaging.hpp"
#include "taxoforge/layout.hpp"
#include "taxoforge/store.hpp"
#include "taxoforge/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace taxoforge;

namespace {

constexpr const char* kVersion = "1.0.0";

std::atomic<bool> g_shutdown{false};

void handle_signal(int) { g_shutdown = true; }

Config load_config_from(const std::string& flag_path) {
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv("TAXOFORGE_CONFIG")) path = env;
    }
    if (path.empty()) path = "./taxoforge.json";
    return load_config(path);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << std::endl;
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        out << text << "\n";
    }
}

nlohmann::json species_to_json(const std::vector<SpeciesEntry>& entries) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : entries)
        arr.push_back({{"key", e.species_key},
                       {"name", e.species_name},
                       {"group", e.group_name},
                       {"status", std::string(living_status_name(e.status))}});
    return arr;
}

int cmd_fetch_taxa(const std::string& config_path, bool resolve, const std::string& out) {
    Config cfg = load_config_from(config_path);
    TaxonomyClient client(cfg.api_base, cfg.http);
    auto species = client.collect_species(cfg.root_taxon, cfg.leaf_rank, cfg.group_rank);
    if (resolve)
        for (auto& e : species) e.status = client.resolve_status(e.species_key);
    emit(species_to_json(species).dump(2), out);
    return 0;
}

int cmd_crawl(const std::string& config_path, int workers_override,
              const std::string& classifier_cmd, const std::string& model_path) {
    Config cfg = load_config_from(config_path);
    if (workers_override > 0) cfg.workers = workers_override;

    fs::create_directories(cfg.dataset_root);
    StateStore store(fs::path(cfg.dataset_root) / StateStore::kLogName);

    // Species come from a previous fetch persisted in the store, or from the
    // API now.
    std::vector<SpeciesEntry> species;
    for (const auto& [key, st] : store.snapshot().species) species.push_back(st.entry);
    if (species.empty()) {
        TaxonomyClient client(cfg.api_base, cfg.http);
        species = client.collect_species(cfg.root_taxon, cfg.leaf_rank, cfg.group_rank);
        for (auto& e : species) e.status = client.resolve_status(e.species_key);
    }

    std::unique_ptr<ClassifierBackend> backend;
    if (!classifier_cmd.empty())
        backend = std::make_unique<CommandBackend>(classifier_cmd, model_path);
    else
        backend = std::make_unique<ConstantBackend>(
            std::vector<std::pair<std::string, double>>{{cfg.positive_label, 1.0}});

    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);

    CrawlReport report =
        run_crawl(cfg, store, *backend, species, [] { return g_shutdown.load(); });
    store.checkpoint();

    nlohmann::json j = {{"attempted", report.attempted},
                        {"accepted", report.accepted},
                        {"rejected", report.rejected},
                        {"duplicates", report.duplicates},
                        {"errors", report.errors},
                        {"interrupted", g_shutdown.load()}};
    std::cout << j.dump() << std::endl;
    return 0;
}

int cmd_stats(const std::string& root, const std::string& out) {
    emit(stats(root).to_json(), out);
    return 0;
}

int cmd_eval_plan(const std::vector<std::string>& roots, const std::string& out) {
    std::vector<std::pair<std::string, std::set<std::string>>> datasets;
    for (const auto& r : roots)
        datasets.emplace_back(fs::path(r).filename().string(), category_set(r));
    auto runs = plan_runs(datasets);

    nlohmann::json arr = nlohmann::json::array();
    for (const auto& run : runs) {
        nlohmann::json participants = nlohmann::json::array();
        for (const auto& p : run.participants) {
            participants.push_back({{"name", p.dataset},
                                    {"missing", p.missing},
                                    {"asterisk", p.asterisk()}});
        }
        arr.push_back({{"run", run.name},
                       {"reference_categories", run.reference_categories},
                       {"participants", participants}});
    }
    emit(arr.dump(2), out);
    return 0;
}

int cmd_eval_split(const std::string& root, int per_cat, std::uint64_t seed) {
    isolate_subset(root, root + ".holdout", root + ".split.json", per_cat, seed);
    std::cout << root + ".split.json" << std::endl;
    return 0;
}

int cmd_eval_restore(const std::string& manifest) {
    restore_subset(load_manifest(manifest));
    return 0;
}

int cmd_eval_run(const std::string& root, const std::vector<std::string>& all_roots,
                 int per_cat, int repeats, std::uint64_t seed,
                 const std::string& classifier_cmd, const std::string& model_path,
                 const std::string& trainer_cmd, const std::string& out) {
    std::vector<std::pair<std::string, std::set<std::string>>> datasets;
    for (const auto& r : all_roots)
        datasets.emplace_back(fs::path(r).filename().string(), category_set(r));
    if (datasets.empty())
        datasets.emplace_back(fs::path(root).filename().string(), category_set(root));

    auto runs = plan_runs(datasets);

    std::unique_ptr<ClassifierBackend> backend;
    if (!classifier_cmd.empty()) {
        backend = std::make_unique<CommandBackend>(classifier_cmd, model_path);
    } else {
        std::vector<std::string> labels(category_set(root).begin(), category_set(root).end());
        backend = std::make_unique<DirectoryOracleBackend>(labels);
    }

    std::optional<TrainerCommand> trainer;
    if (!trainer_cmd.empty()) trainer = TrainerCommand{trainer_cmd, fs::temp_directory_path()};

    std::string report;
    for (const auto& run : runs) {
        EvalResult result = run_eval(run, root, *backend, per_cat, repeats, seed, trainer);
        report += result.to_json(run) + "\n";
        std::cerr << result.to_table(run);
    }
    emit(report, out);
    return 0;
}

int cmd_hash(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot open " + file);
    std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>()};
    std::cout << hash_hex(average_hash(decode_image(data))) << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taxoforge - automated labeled image dataset pipeline"};
    app.require_subcommand(1);

    std::string config_path, out_path, root, manifest, classifier_cmd, model_path,
        trainer_cmd, hash_file;
    std::vector<std::string> roots;
    int per_cat = 5, repeats = 5, workers = 0;
    std::uint64_t seed = 0;
    bool resolve_status = false;

    app.add_option("--config", config_path, "config file path (default ./taxoforge.json)");

    auto* fetch = app.add_subcommand("fetch-taxa", "enumerate species under the root taxon");
    fetch->add_flag("--resolve-status", resolve_status, "also query living status");
    fetch->add_option("--out", out_path, "write JSON here instead of stdout");

    auto* crawl = app.add_subcommand("crawl", "run the image crawl end to end (resumable)");
    crawl->add_option("--workers", workers, "override config worker count");
    crawl->add_option("--classifier", classifier_cmd, "external classifier command");
    crawl->add_option("--model", model_path, "model path handed to the classifier");

    auto* stats_cmd = app.add_subcommand("stats", "dataset statistics as JSON");
    stats_cmd->add_option("root", root, "dataset root")->required();
    stats_cmd->add_option("--out", out_path, "write JSON here instead of stdout");

    auto* plan = app.add_subcommand("eval-plan", "category-intersection run planning");
    plan->add_option("roots", roots, "dataset roots")->required();
    plan->add_option("--out", out_path, "write JSON here instead of stdout");

    auto* split = app.add_subcommand("eval-split", "isolate a seeded holdout subset");
    split->add_option("root", root, "dataset root")->required();
    split->add_option("--per-cat", per_cat, "images per category (default 5)");
    split->add_option("--seed", seed, "shuffle seed");

    auto* restore = app.add_subcommand("eval-restore", "undo an eval-split");
    restore->add_option("manifest", manifest, "split manifest path")->required();

    auto* eval = app.add_subcommand("eval-run", "run the evaluation protocol");
    eval->add_option("root", root, "dataset under evaluation")->required();
    eval->add_option("--datasets", roots, "all dataset roots for intersection planning");
    eval->add_option("--per-cat", per_cat, "holdout images per category (default 5)");
    eval->add_option("--repeats", repeats, "repetitions per run (default 5)");
    eval->add_option("--seed", seed, "base seed");
    eval->add_option("--classifier", classifier_cmd, "external classifier command");
    eval->add_option("--model", model_path, "model path handed to the classifier");
    eval->add_option("--trainer", trainer_cmd, "external training command");
    eval->add_option("--out", out_path, "write report here instead of stdout");

    auto* hash = app.add_subcommand("hash", "print the 64-bit average hash of an image");
    hash->add_option("file", hash_file, "image file")->required();

    auto* version = app.add_subcommand("version", "print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (fetch->parsed()) return cmd_fetch_taxa(config_path, resolve_status, out_path);
        if (crawl->parsed()) return cmd_crawl(config_path, workers, classifier_cmd, model_path);
        if (stats_cmd->parsed()) return cmd_stats(root, out_path);
        if (plan->parsed()) return cmd_eval_plan(roots, out_path);
        if (split->parsed()) return cmd_eval_split(root, per_cat, seed);
        if (restore->parsed()) return cmd_eval_restore(manifest);
        if (eval->parsed())
            return cmd_eval_run(root, roots, per_cat, repeats, seed, classifier_cmd,
                                model_path, trainer_cmd, out_path);
        if (hash->parsed()) return cmd_hash(hash_file);
        if (version->parsed()) {
            std::cout << "taxoforge " << kVersion << std::endl;
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
