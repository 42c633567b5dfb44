#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "taxoforge/filter.hpp"

namespace taxoforge {

struct SplitManifest {
    struct Entry {
        std::string rel_path;      // relative to dataset root
        std::string holdout_path;  // relative to holdout root
    };
    std::uint64_t seed = 0;
    std::string dataset_root;
    std::string holdout_root;
    std::vector<Entry> entries;
    // categories that had fewer than per_cat images; all of theirs were taken
    std::vector<std::string> shortfall;
};

// Per category: sort names ascending, Fisher-Yates shuffle seeded from
// seed XOR fnv1a64(category), move the first per_cat images into
// holdout_root/<category>/. The manifest file is written before any move.
// When categories is given, only those category directories participate.
SplitManifest isolate_subset(const std::filesystem::path& root,
                             const std::filesystem::path& holdout_root,
                             const std::filesystem::path& manifest_path, int per_cat,
                             std::uint64_t seed,
                             const std::optional<std::set<std::string>>& categories =
                                 std::nullopt);

SplitManifest load_manifest(const std::filesystem::path& manifest_path);

// Inverse of isolate_subset. Throws MissingHoldout on a tampered holdout.
void restore_subset(const SplitManifest& manifest);

struct RunPlan {
    std::string name;
    std::set<std::string> reference_categories;
    struct Participant {
        std::string dataset;
        std::set<std::string> missing;
        bool asterisk() const { return !missing.empty(); }
    };
    std::vector<Participant> participants;
};

// One run per dataset (reference = its own categories) ordered by descending
// reference size, then a final "all" run over the intersection.
std::vector<RunPlan> plan_runs(
    const std::vector<std::pair<std::string, std::set<std::string>>>& datasets);

// Percent of samples whose truth appears in the first k labels, in hundredths
// of a percent (half-up). Throws EmptyInput.
std::int64_t topk_accuracy(const std::vector<Classification>& predictions,
                           const std::vector<std::string>& truths, int k);

struct EvalResult {
    std::string run;
    int repeats = 0;
    std::int64_t top1_mean_hundredths = 0;
    std::int64_t top5_mean_hundredths = 0;

    std::string to_json(const RunPlan& plan) const;
    std::string to_table(const RunPlan& plan) const;
};

// A training hand-off command: invoked as
//   cmd --image_dir <root> --output_graph <graph> --output_labels <labels>
// before each repeat's scoring. Empty = skip (fixed-oracle backends).
struct TrainerCommand {
    std::string command;
    std::filesystem::path workdir;  // receives graph/labels outputs
};

EvalResult run_eval(const RunPlan& plan, const std::filesystem::path& dataset_root,
                    ClassifierBackend& backend, int per_cat, int repeats,
                    std::uint64_t seed,
                    const std::optional<TrainerCommand>& trainer = std::nullopt);

}  // namespace taxoforge
