#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <string>

#include "taxoforge/taxonomy.hpp"

namespace taxoforge {

struct SpeciesState {
    SpeciesEntry entry;
    bool done = false;
};

struct StoreSnapshot {
    std::set<std::string> urls;
    std::set<std::uint64_t> hashes;
    std::map<long long, SpeciesState> species;
    std::uint64_t cursor = 0;
};

// Append-only log backed key-value state. Records are length-framed and
// CRC-checked; a truncated final record is skipped on replay, a bad checksum
// elsewhere raises CorruptLog. All mutations are internally serialized.
class StateStore {
public:
    // Opens (creating if absent) and replays the log at path.
    explicit StateStore(const std::filesystem::path& path);
    ~StateStore();

    StateStore(const StateStore&) = delete;
    StateStore& operator=(const StateStore&) = delete;

    bool register_url(const std::string& url);
    bool register_hash(std::uint64_t hash);
    void put_species(const SpeciesEntry& entry);
    void mark_done(long long species_key);

    // Flush buffered records to disk.
    void checkpoint();

    StoreSnapshot snapshot() const;

    // Replay without opening for writing.
    static StoreSnapshot replay(const std::filesystem::path& path);

    static constexpr const char* kLogName = "state.tflog";

private:
    void append(char tag, const std::string& payload);

    mutable std::mutex mu_;
    StoreSnapshot state_;
    std::FILE* log_ = nullptr;
};

}  // namespace taxoforge
