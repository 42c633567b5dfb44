#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "taxoforge/errors.hpp"
#include "taxoforge/store.hpp"
#include "test_util.hpp"

using namespace taxoforge;
using namespace taxoforge::testing;

TEST_CASE("register_url and register_hash are idempotent set inserts") {
    TempDir dir("store");
    StateStore store(dir.path / "state.tflog");

    CHECK(store.register_url("http://a/1.jpg"));
    CHECK(!store.register_url("http://a/1.jpg"));
    CHECK(store.register_url("http://a/2.jpg"));

    CHECK(store.register_hash(0xABCD));
    CHECK(!store.register_hash(0xABCD));
    CHECK(store.register_hash(0xEF01));

    auto snap = store.snapshot();
    CHECK(snap.urls.size() == 2);
    CHECK(snap.hashes.size() == 2);
}

TEST_CASE("return values track set cardinality exactly") {
    TempDir dir("store");
    StateStore store(dir.path / "state.tflog");

    std::mt19937 rng(9);
    std::uniform_int_distribution<int> pick(0, 30);
    size_t expected = 0;
    for (int i = 0; i < 500; ++i) {
        const bool inserted = store.register_url("u" + std::to_string(pick(rng)));
        if (inserted) ++expected;
        CHECK(store.snapshot().urls.size() == expected);
    }
}

TEST_CASE("empty log replays to an empty snapshot") {
    TempDir dir("store");
    auto snap = StateStore::replay(dir.path / "state.tflog");
    CHECK(snap.urls.empty());
    CHECK(snap.hashes.empty());
    CHECK(snap.species.empty());
    CHECK(snap.cursor == 0);
}

TEST_CASE("checkpointed state replays identically") {
    TempDir dir("store");
    const auto log = dir.path / "state.tflog";
    {
        StateStore store(log);
        store.register_url("http://a/");
        store.register_url("http://b/");
        store.register_url("http://c/");
        store.register_hash(42);
        store.put_species({7, "Anas platyrhynchos", "Anseriformes", LivingStatus::Alive});
        store.mark_done(7);
        store.checkpoint();
    }
    auto snap = StateStore::replay(log);
    CHECK(snap.urls.size() == 3);
    CHECK(snap.hashes.count(42) == 1);
    REQUIRE(snap.species.count(7) == 1);
    CHECK(snap.species.at(7).entry.group_name == "Anseriformes");
    CHECK(snap.species.at(7).done);
    CHECK(snap.cursor == 1);
}

TEST_CASE("replay of any prefix matches the state at that moment") {
    TempDir dir("store");
    const auto log = dir.path / "state.tflog";

    std::vector<size_t> url_counts;
    {
        StateStore store(log);
        for (int i = 0; i < 10; ++i) {
            store.register_url("u" + std::to_string(i));
            store.checkpoint();
            url_counts.push_back(std::filesystem::file_size(log));
        }
    }

    auto full = read_file(log);
    for (size_t i = 0; i < url_counts.size(); ++i) {
        const auto prefix_path = dir.path / "prefix.tflog";
        write_file(prefix_path, std::vector<std::uint8_t>(full.begin(),
                                                          full.begin() + url_counts[i]));
        CHECK(StateStore::replay(prefix_path).urls.size() == i + 1);
    }
}

TEST_CASE("truncated final record is skipped without error") {
    TempDir dir("store");
    const auto log = dir.path / "state.tflog";
    {
        StateStore store(log);
        store.register_url("first");
        store.register_url("second");
        store.register_url("third");
        store.checkpoint();
    }
    auto full = read_file(log);
    for (size_t cut = 1; cut < 12; ++cut) {
        write_file(dir.path / "cut.tflog",
                   std::vector<std::uint8_t>(full.begin(), full.end() - cut));
        auto snap = StateStore::replay(dir.path / "cut.tflog");
        CHECK(snap.urls.size() == 2);
    }
}

TEST_CASE("corruption in a non-final record raises CorruptLog") {
    TempDir dir("store");
    const auto log = dir.path / "state.tflog";
    {
        StateStore store(log);
        store.register_url("aaaa");
        store.register_url("bbbb");
        store.checkpoint();
    }
    auto bytes = read_file(log);
    bytes[6] ^= 0xFF;  // payload byte of the first record
    write_file(dir.path / "bad.tflog", bytes);
    CHECK_THROWS_AS(StateStore::replay(dir.path / "bad.tflog"), CorruptLog);
}

TEST_CASE("round-trip property over generated states") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        TempDir dir("store");
        const auto log = dir.path / "state.tflog";
        StoreSnapshot expected;
        {
            StateStore store(log);
            std::uniform_int_distribution<int> n(0, 20);
            const int urls = n(rng), hashes = n(rng), species = n(rng) % 5;
            for (int i = 0; i < urls; ++i) store.register_url("u" + std::to_string(i));
            for (int i = 0; i < hashes; ++i) store.register_hash(rng());
            for (int i = 0; i < species; ++i) {
                store.put_species({i + 1, "sp" + std::to_string(i), "g", LivingStatus::Unknown});
                if (rng() % 2) store.mark_done(i + 1);
            }
            store.checkpoint();
            expected = store.snapshot();
        }
        auto replayed = StateStore::replay(log);
        CHECK(replayed.urls == expected.urls);
        CHECK(replayed.hashes == expected.hashes);
        CHECK(replayed.cursor == expected.cursor);
        REQUIRE(replayed.species.size() == expected.species.size());
        for (const auto& [k, v] : expected.species) {
            REQUIRE(replayed.species.count(k) == 1);
            CHECK(replayed.species.at(k).done == v.done);
            CHECK(replayed.species.at(k).entry.species_name == v.entry.species_name);
        }
    }
}

TEST_CASE("reopening continues the same log") {
    TempDir dir("store");
    const auto log = dir.path / "state.tflog";
    {
        StateStore store(log);
        store.register_url("u1");
        store.checkpoint();
    }
    {
        StateStore store(log);
        CHECK(!store.register_url("u1"));
        CHECK(store.register_url("u2"));
        store.checkpoint();
    }
    CHECK(StateStore::replay(log).urls.size() == 2);
}
