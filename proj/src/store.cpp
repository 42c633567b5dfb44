#include "taxoforge/store.hpp"

#include <cstdio>
#include <cstring>
#include <vector>

#include <unistd.h>
#include <zlib.h>

#include <json.hpp>

#include "taxoforge/errors.hpp"

namespace taxoforge {
namespace {

using nlohmann::json;

void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t read_u32le(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t read_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

std::uint32_t crc_of(char tag, const std::string& payload) {
    uLong crc = crc32(0L, Z_NULL, 0);
    unsigned char t = static_cast<unsigned char>(tag);
    crc = crc32(crc, &t, 1);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(payload.data()),
                static_cast<uInt>(payload.size()));
    return static_cast<std::uint32_t>(crc);
}

std::string species_payload(const SpeciesEntry& e, bool done) {
    json j = {{"key", e.species_key},
              {"name", e.species_name},
              {"group", e.group_name},
              {"status", std::string(living_status_name(e.status))},
              {"done", done}};
    return j.dump();
}

LivingStatus status_from_name(const std::string& s) {
    if (s == "ALIVE") return LivingStatus::Alive;
    if (s == "EXTINCT") return LivingStatus::Extinct;
    return LivingStatus::Unknown;
}

void apply_record(StoreSnapshot& st, char tag, const std::string& payload,
                  long long offset) {
    switch (tag) {
        case 'U':
            st.urls.insert(payload);
            break;
        case 'H':
            if (payload.size() != 8) throw CorruptLog(offset);
            st.hashes.insert(read_u64le(reinterpret_cast<const unsigned char*>(payload.data())));
            break;
        case 'S': {
            json j;
            try {
                j = json::parse(payload);
            } catch (const json::parse_error&) {
                throw CorruptLog(offset);
            }
            SpeciesState s;
            s.entry.species_key = j.at("key").get<long long>();
            s.entry.species_name = j.at("name").get<std::string>();
            s.entry.group_name = j.at("group").get<std::string>();
            s.entry.status = status_from_name(j.at("status").get<std::string>());
            s.done = j.at("done").get<bool>();
            st.species[s.entry.species_key] = std::move(s);
            break;
        }
        case 'C':
            if (payload.size() != 8) throw CorruptLog(offset);
            st.cursor = read_u64le(reinterpret_cast<const unsigned char*>(payload.data()));
            break;
        default:
            throw CorruptLog(offset);
    }
}

StoreSnapshot replay_bytes(const std::vector<unsigned char>& data) {
    StoreSnapshot st;
    size_t pos = 0;
    while (pos < data.size()) {
        // Truncation anywhere in the final record means crash mid-write:
        // skip it. A checksum failure on a fully framed record that is not
        // last is corruption.
        if (pos + 4 > data.size()) break;
        const std::uint32_t len = read_u32le(data.data() + pos);
        const size_t record_end = pos + 4 + 1 + len + 4;
        if (record_end > data.size()) break;

        const char tag = static_cast<char>(data[pos + 4]);
        std::string payload(reinterpret_cast<const char*>(data.data() + pos + 5), len);
        const std::uint32_t stored_crc = read_u32le(data.data() + pos + 5 + len);
        if (crc_of(tag, payload) != stored_crc) {
            if (record_end == data.size()) break;  // torn final record
            throw CorruptLog(static_cast<long long>(pos));
        }
        apply_record(st, tag, payload, static_cast<long long>(pos));
        pos = record_end;
    }
    return st;
}

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
    std::FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) return {};
    std::vector<unsigned char> data;
    unsigned char buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) data.insert(data.end(), buf, buf + n);
    std::fclose(f);
    return data;
}

}  // namespace

StateStore::StateStore(const std::filesystem::path& path) {
    state_ = replay_bytes(slurp(path));
    log_ = std::fopen(path.string().c_str(), "ab");
    if (!log_) throw IoError("cannot open state log for append: " + path.string());
}

StateStore::~StateStore() {
    if (log_) {
        std::fflush(log_);
        std::fclose(log_);
    }
}

void StateStore::append(char tag, const std::string& payload) {
    std::string rec;
    put_u32le(rec, static_cast<std::uint32_t>(payload.size()));
    rec.push_back(tag);
    rec += payload;
    put_u32le(rec, crc_of(tag, payload));
    if (std::fwrite(rec.data(), 1, rec.size(), log_) != rec.size())
        throw IoError("state log write failed");
}

bool StateStore::register_url(const std::string& url) {
    std::lock_guard lock(mu_);
    if (!state_.urls.insert(url).second) return false;
    append('U', url);
    return true;
}

bool StateStore::register_hash(std::uint64_t hash) {
    std::lock_guard lock(mu_);
    if (!state_.hashes.insert(hash).second) return false;
    std::string payload;
    put_u64le(payload, hash);
    append('H', payload);
    return true;
}

void StateStore::put_species(const SpeciesEntry& entry) {
    std::lock_guard lock(mu_);
    auto it = state_.species.find(entry.species_key);
    const bool done = it != state_.species.end() && it->second.done;
    state_.species[entry.species_key] = {entry, done};
    append('S', species_payload(entry, done));
}

void StateStore::mark_done(long long species_key) {
    std::lock_guard lock(mu_);
    auto it = state_.species.find(species_key);
    if (it == state_.species.end() || it->second.done) return;
    it->second.done = true;
    state_.cursor++;
    append('S', species_payload(it->second.entry, true));
    std::string payload;
    put_u64le(payload, state_.cursor);
    append('C', payload);
}

void StateStore::checkpoint() {
    std::lock_guard lock(mu_);
    if (std::fflush(log_) != 0) throw IoError("state log flush failed");
    fsync(fileno(log_));
}

StoreSnapshot StateStore::snapshot() const {
    std::lock_guard lock(mu_);
    return state_;
}

StoreSnapshot StateStore::replay(const std::filesystem::path& path) {
    return replay_bytes(slurp(path));
}

}  // namespace taxoforge
