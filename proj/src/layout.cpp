#include "taxoforge/layout.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "taxoforge/errors.hpp"
#include "taxoforge/rounding.hpp"

namespace taxoforge {
namespace fs = std::filesystem;
namespace {

// Serializes seq probing so concurrent stores of an equal hash cannot race
// to the same filename.
std::mutex g_seq_mu;

}  // namespace

std::string DatasetStats::to_json() const {
    nlohmann::json j = {{"size_bytes", size_bytes},
                        {"pictures", pictures},
                        {"categories", categories},
                        {"avg_pictures", format_hundredths(avg_hundredths)}};
    return j.dump();
}

std::string sanitize_category(const std::string& category) {
    std::string out;
    for (unsigned char c : category) {
        if (c >= 'A' && c <= 'Z')
            out.push_back(static_cast<char>(c - 'A' + 'a'));
        else if (c == ' ')
            out.push_back('_');
        else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-')
            out.push_back(static_cast<char>(c));
    }
    return out;
}

std::string hash_hex(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

ImageRecord store_image(const fs::path& root, const std::string& category,
                        const std::vector<std::uint8_t>& jpeg, std::uint64_t hash,
                        const std::string& url) {
    const std::string dir_name = sanitize_category(category);
    if (dir_name.empty()) throw SanitizeEmpty("category sanitizes to empty: " + category);

    const fs::path dir = root / dir_name;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const std::string hex = hash_hex(hash);
    std::lock_guard lock(g_seq_mu);
    int seq = 0;
    fs::path target;
    do {
        target = dir / (hex + "_" + std::to_string(seq) + ".jpg");
        ++seq;
    } while (fs::exists(target));

    const fs::path tmp = dir / ("." + target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(jpeg.data()),
                  static_cast<std::streamsize>(jpeg.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename into place: " + ec.message());

    ImageRecord rec;
    rec.url = url;
    rec.hash = hash;
    rec.category = category;
    rec.rel_path = dir_name + "/" + target.filename().string();
    return rec;
}

DatasetStats stats(const fs::path& root) {
    if (!fs::exists(root)) throw IoError("no such dataset root: " + root.string());

    DatasetStats st;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        st.categories++;
        for (const auto& file : fs::directory_iterator(entry.path())) {
            if (!file.is_regular_file() || file.path().extension() != ".jpg") continue;
            st.pictures++;
            st.size_bytes += file.file_size();
        }
    }
    if (st.categories > 0)
        st.avg_hundredths = ratio_hundredths(static_cast<std::int64_t>(st.pictures),
                                             static_cast<std::int64_t>(st.categories));
    return st;
}

std::set<std::string> category_set(const fs::path& root) {
    std::set<std::string> out;
    if (!fs::exists(root)) return out;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory())
            out.insert(sanitize_category(entry.path().filename().string()));
    return out;
}

std::vector<std::set<std::string>> category_sets(const std::vector<fs::path>& roots) {
    std::vector<std::set<std::string>> out;
    out.reserve(roots.size());
    for (const auto& r : roots) out.push_back(category_set(r));
    return out;
}

}  // namespace taxoforge
