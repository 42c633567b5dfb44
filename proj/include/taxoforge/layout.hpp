#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace taxoforge {

struct ImageRecord {
    std::string url;
    std::uint64_t hash = 0;
    std::string category;
    std::string rel_path;  // <sanitized category>/<16-hex hash>_<seq>.jpg
};

struct DatasetStats {
    std::uint64_t size_bytes = 0;
    std::uint64_t pictures = 0;
    std::uint64_t categories = 0;
    std::int64_t avg_hundredths = 0;  // avg pictures per category, 2 decimals

    std::string to_json() const;
};

// lowercase, spaces to '_', everything outside [a-z0-9_-] dropped.
std::string sanitize_category(const std::string& category);

std::string hash_hex(std::uint64_t hash);

// Writes the JPEG atomically under root/<sanitized>/<hex>_<seq>.jpg. The seq
// suffix only grows when the same hash is stored twice, which equality dedup
// prevents in the pipeline.
ImageRecord store_image(const std::filesystem::path& root, const std::string& category,
                        const std::vector<std::uint8_t>& jpeg, std::uint64_t hash,
                        const std::string& url = {});

DatasetStats stats(const std::filesystem::path& root);

std::vector<std::set<std::string>> category_sets(
    const std::vector<std::filesystem::path>& roots);

std::set<std::string> category_set(const std::filesystem::path& root);

}  // namespace taxoforge
