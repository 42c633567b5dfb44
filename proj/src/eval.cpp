#include "taxoforge/eval.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "taxoforge/errors.hpp"
#include "taxoforge/layout.hpp"
#include "taxoforge/prng.hpp"
#include "taxoforge/rounding.hpp"

namespace taxoforge {
namespace fs = std::filesystem;
namespace {

using nlohmann::json;

std::vector<std::string> sorted_files(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

void fisher_yates(std::vector<std::string>& v, Prng& rng) {
    for (size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.next_below(i)]);
}

void write_manifest(const SplitManifest& m, const fs::path& path) {
    json j;
    j["seed"] = m.seed;
    j["dataset_root"] = m.dataset_root;
    j["holdout_root"] = m.holdout_root;
    j["entries"] = json::array();
    for (const auto& e : m.entries)
        j["entries"].push_back({{"rel_path", e.rel_path}, {"holdout_path", e.holdout_path}});
    j["shortfall"] = m.shortfall;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("short manifest write: " + path.string());
}

}  // namespace

SplitManifest isolate_subset(const fs::path& root, const fs::path& holdout_root,
                             const fs::path& manifest_path, int per_cat,
                             std::uint64_t seed,
                             const std::optional<std::set<std::string>>& categories) {
    SplitManifest m;
    m.seed = seed;
    m.dataset_root = fs::absolute(root).string();
    m.holdout_root = fs::absolute(holdout_root).string();

    std::vector<std::string> cats;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory()) cats.push_back(e.path().filename().string());
    std::sort(cats.begin(), cats.end());

    for (const auto& cat : cats) {
        if (categories && !categories->count(cat)) continue;
        auto names = sorted_files(root / cat);
        Prng rng{seed ^ fnv1a64(cat)};
        fisher_yates(names, rng);

        const int take = std::min<int>(per_cat, static_cast<int>(names.size()));
        if (take < per_cat) m.shortfall.push_back(cat);
        for (int i = 0; i < take; ++i)
            m.entries.push_back({cat + "/" + names[i], cat + "/" + names[i]});
    }

    // Manifest hits disk before the first move so a crash mid-split stays
    // restorable.
    write_manifest(m, manifest_path);

    for (const auto& e : m.entries) {
        const fs::path src = root / e.rel_path;
        const fs::path dst = holdout_root / e.holdout_path;
        std::error_code ec;
        fs::create_directories(dst.parent_path(), ec);
        fs::rename(src, dst, ec);
        if (ec) throw IoError("cannot move " + src.string() + ": " + ec.message());
    }
    return m;
}

SplitManifest load_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + manifest_path.string());
    json j = json::parse(in);

    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.dataset_root = j.at("dataset_root").get<std::string>();
    m.holdout_root = j.at("holdout_root").get<std::string>();
    for (const auto& e : j.at("entries"))
        m.entries.push_back({e.at("rel_path").get<std::string>(),
                             e.at("holdout_path").get<std::string>()});
    if (j.contains("shortfall"))
        m.shortfall = j.at("shortfall").get<std::vector<std::string>>();
    return m;
}

void restore_subset(const SplitManifest& manifest) {
    const fs::path root = manifest.dataset_root;
    const fs::path holdout = manifest.holdout_root;
    for (const auto& e : manifest.entries) {
        const fs::path src = holdout / e.holdout_path;
        if (!fs::exists(src)) throw MissingHoldout("missing holdout file: " + src.string());
    }
    for (const auto& e : manifest.entries) {
        const fs::path src = holdout / e.holdout_path;
        const fs::path dst = root / e.rel_path;
        std::error_code ec;
        fs::create_directories(dst.parent_path(), ec);
        fs::rename(src, dst, ec);
        if (ec) throw IoError("cannot restore " + src.string() + ": " + ec.message());
    }
    // tidy emptied holdout category dirs
    std::error_code ec;
    if (fs::exists(holdout)) {
        for (const auto& d : fs::directory_iterator(holdout))
            if (d.is_directory() && fs::is_empty(d.path())) fs::remove(d.path(), ec);
        if (fs::is_empty(holdout)) fs::remove(holdout, ec);
    }
}

std::vector<RunPlan> plan_runs(
    const std::vector<std::pair<std::string, std::set<std::string>>>& datasets) {
    auto sorted = datasets;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
        return a.first < b.first;
    });

    auto participants_for = [&](const std::set<std::string>& reference) {
        std::vector<RunPlan::Participant> out;
        for (const auto& [name, cats] : datasets) {
            RunPlan::Participant p;
            p.dataset = name;
            std::set_difference(reference.begin(), reference.end(), cats.begin(),
                                cats.end(), std::inserter(p.missing, p.missing.end()));
            out.push_back(std::move(p));
        }
        return out;
    };

    std::vector<RunPlan> runs;
    for (const auto& [name, cats] : sorted)
        runs.push_back({name, cats, participants_for(cats)});

    std::set<std::string> intersection;
    if (!datasets.empty()) {
        intersection = datasets.front().second;
        for (const auto& [name, cats] : datasets) {
            std::set<std::string> next;
            std::set_intersection(intersection.begin(), intersection.end(), cats.begin(),
                                  cats.end(), std::inserter(next, next.end()));
            intersection = std::move(next);
        }
    }
    runs.push_back({"all", intersection, participants_for(intersection)});
    return runs;
}

std::int64_t topk_accuracy(const std::vector<Classification>& predictions,
                           const std::vector<std::string>& truths, int k) {
    if (predictions.empty() || predictions.size() != truths.size() || k < 1)
        throw EmptyInput("topk_accuracy needs equal-length non-empty inputs and k >= 1");

    std::int64_t correct = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        const auto& scores = predictions[i].scores;
        const int limit = std::min<int>(k, static_cast<int>(scores.size()));
        for (int j = 0; j < limit; ++j) {
            if (scores[j].first == truths[i]) {
                ++correct;
                break;
            }
        }
    }
    return percent_hundredths(correct, static_cast<std::int64_t>(predictions.size()));
}

std::string EvalResult::to_json(const RunPlan& plan) const {
    json j;
    j["run"] = run;
    j["repeats"] = repeats;
    j["top1_mean"] = format_hundredths(top1_mean_hundredths);
    j["top5_mean"] = format_hundredths(top5_mean_hundredths);
    j["participants"] = json::array();
    for (const auto& p : plan.participants)
        j["participants"].push_back({{"name", p.dataset}, {"asterisk", p.asterisk()}});
    return j.dump();
}

std::string EvalResult::to_table(const RunPlan& plan) const {
    std::string out;
    out += "run: " + run + " (" + std::to_string(plan.reference_categories.size()) +
           " categories, " + std::to_string(repeats) + " repeats)\n";
    out += "  top-1  " + format_hundredths(top1_mean_hundredths) + "%\n";
    out += "  top-5  " + format_hundredths(top5_mean_hundredths) + "%\n";
    for (const auto& p : plan.participants)
        out += "  dataset " + p.dataset + (p.asterisk() ? " *" : "") + "\n";
    return out;
}

EvalResult run_eval(const RunPlan& plan, const fs::path& dataset_root,
                    ClassifierBackend& backend, int per_cat, int repeats,
                    std::uint64_t seed, const std::optional<TrainerCommand>& trainer) {
    if (repeats < 1) throw EmptyInput("repeats must be >= 1");

    EvalResult result;
    result.run = plan.name;
    result.repeats = repeats;

    std::int64_t top1_sum = 0, top5_sum = 0;
    for (int r = 0; r < repeats; ++r) {
        const fs::path holdout = dataset_root.string() + ".holdout";
        const fs::path manifest_path = dataset_root.string() + ".split.json";

        SplitManifest manifest =
            isolate_subset(dataset_root, holdout, manifest_path, per_cat, seed + r,
                           plan.reference_categories);
        try {
            if (trainer && !trainer->command.empty()) {
                const std::string cmd =
                    trainer->command + " --image_dir " + dataset_root.string() +
                    " --output_graph " + (trainer->workdir / "graph.pb").string() +
                    " --output_labels " + (trainer->workdir / "labels.txt").string();
                if (std::system(cmd.c_str()) != 0)
                    throw Error("trainer command failed: " + cmd);
            }

            std::vector<Classification> predictions;
            std::vector<std::string> truths;
            for (const auto& e : manifest.entries) {
                const fs::path img = fs::path(manifest.holdout_root) / e.holdout_path;
                predictions.push_back(backend.classify(img));
                truths.push_back(fs::path(e.holdout_path).parent_path().filename().string());
            }
            top1_sum += topk_accuracy(predictions, truths, 1);
            top5_sum += topk_accuracy(predictions, truths, 5);
        } catch (...) {
            restore_subset(manifest);
            throw;
        }
        restore_subset(manifest);
    }

    result.top1_mean_hundredths = (2 * top1_sum + repeats) / (2 * repeats);
    result.top5_mean_hundredths = (2 * top5_sum + repeats) / (2 * repeats);
    return result;
}

}  // namespace taxoforge
