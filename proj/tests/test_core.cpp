#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "taxoforge/config.hpp"
#include "taxoforge/errors.hpp"
#include "taxoforge/prng.hpp"
#include "taxoforge/progress.hpp"
#include "taxoforge/rank.hpp"
#include "taxoforge/rounding.hpp"
#include "test_util.hpp"

using namespace taxoforge;
using namespace taxoforge::testing;

namespace {

// Independent SplitMix64 oracle, written straight from the published
// reference recipe, kept apart from Prng.
std::uint64_t splitmix64_reference(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

const char* kMinimalConfig = R"({
  "apiBase": "http://api.example.test/v1/species/",
  "root_taxon": 212,
  "dataset_root": "/tmp/ds"
})";

}  // namespace

TEST_CASE("prng first output for seed 0") {
    Prng p{0};
    CHECK(p.next() == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("prng determinism and seed separation") {
    Prng a{0}, b{0};
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

    Prng s1{1}, s2{2};
    CHECK(s1.next() != s2.next());
}

TEST_CASE("prng matches reference recipe over many seeds") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL, 42ULL, 0xDEADBEEFULL, UINT64_MAX}) {
        Prng p{seed};
        std::uint64_t ref_state = seed;
        for (int i = 0; i < 50; ++i) CHECK(p.next() == splitmix64_reference(ref_state));
    }
}

TEST_CASE("rank total order") {
    CHECK(coarser_than(Rank::Order, Rank::Species));
    CHECK(coarser_than(Rank::Domain, Rank::Kingdom));
    CHECK(!coarser_than(Rank::Species, Rank::Genus));
    for (int i = 0; i < 8; ++i) {
        auto r = static_cast<Rank>(i);
        CHECK(parse_rank(rank_name(r)) == r);
        for (int j = 0; j < 8; ++j) {
            auto s = static_cast<Rank>(j);
            // strict total order: exactly one of <, ==, > holds
            const int cmp = (coarser_than(r, s) ? 1 : 0) + (r == s ? 1 : 0) +
                            (coarser_than(s, r) ? 1 : 0);
            CHECK(cmp == 1);
        }
    }
    CHECK(parse_rank("order") == Rank::Order);
    CHECK(!parse_rank("SUBSPECIES"));
}

TEST_CASE("load_config accepts apiBase alias and fills defaults") {
    TempDir dir("cfg");
    write_file(dir.path / "c.json", std::string(kMinimalConfig));
    Config cfg = load_config(dir.path / "c.json");
    CHECK(cfg.api_base == "http://api.example.test/v1/species/");
    CHECK(cfg.root_taxon == 212);
    CHECK(cfg.workers == 4);
    CHECK(cfg.max_dim == 500);
    CHECK(cfg.accept_threshold == 0.5);
    CHECK(cfg.group_rank == Rank::Order);
    CHECK(cfg.leaf_rank == Rank::Species);
    CHECK(cfg.http.max_redirects == 5);
    CHECK(cfg.http.retries_5xx == 3);
}

TEST_CASE("load_config errors") {
    TempDir dir("cfg");

    write_file(dir.path / "missing.json", std::string(R"({"root_taxon": 1})"));
    CHECK_THROWS_AS(load_config(dir.path / "missing.json"), MissingKey);

    write_file(dir.path / "bad.json", std::string("{ not json"));
    CHECK_THROWS_AS(load_config(dir.path / "bad.json"), ParseError);

    write_file(dir.path / "range.json",
               std::string(R"({"apiBase":"http://x/","root_taxon":1,)"
                           R"("dataset_root":"/tmp/ds","accept_threshold":1.5})"));
    CHECK_THROWS_AS(load_config(dir.path / "range.json"), InvalidValue);

    write_file(dir.path / "rel.json",
               std::string(R"({"apiBase":"api/","root_taxon":1,"dataset_root":"/d"})"));
    CHECK_THROWS_AS(load_config(dir.path / "rel.json"), InvalidValue);

    write_file(dir.path / "tmpl.json",
               std::string(R"({"apiBase":"http://x/","root_taxon":1,"dataset_root":"/d",)"
                           R"("engines":[{"name":"e","url_template":"http://x/?q={query}"}]})"));
    CHECK_THROWS_AS(load_config(dir.path / "tmpl.json"), InvalidValue);
}

TEST_CASE("config round-trips through serialization") {
    TempDir dir("cfg");
    write_file(dir.path / "c.json",
               std::string(R"({"api_base":"http://x/","root_taxon":7,"dataset_root":"/d",)"
                           R"("engines":[{"name":"g","url_template":"http://g/?q={query}&o={offset}",)"
                           R"("page_size":10}],"workers":2,"seed":99,"max_dim":300})"));
    Config a = load_config(dir.path / "c.json");
    write_file(dir.path / "rt.json", serialize_config(a));
    Config b = load_config(dir.path / "rt.json");

    CHECK(a.api_base == b.api_base);
    CHECK(a.root_taxon == b.root_taxon);
    CHECK(a.dataset_root == b.dataset_root);
    CHECK(a.engines.size() == b.engines.size());
    CHECK(a.engines[0].url_template == b.engines[0].url_template);
    CHECK(a.engines[0].page_size == b.engines[0].page_size);
    CHECK(a.workers == b.workers);
    CHECK(a.seed == b.seed);
    CHECK(a.max_dim == b.max_dim);
    CHECK(a.accept_threshold == b.accept_threshold);
    CHECK(a.http.timeout_ms == b.http.timeout_ms);
}

TEST_CASE("progress line format") {
    CHECK(progress_line({11817, 15758, 3600000}, "crawl") ==
          "crawl 11817/15758 (74.99%) elapsed=1:00:00 eta=0:20:00");
    CHECK(progress_line({3, 3, 5000}, "crawl") ==
          "crawl 3/3 (100.00%) elapsed=0:00:05 eta=0:00:00");
    CHECK(progress_line({1, 3, 10000}, "x") ==
          "x 1/3 (33.33%) elapsed=0:00:10 eta=0:00:20");
    CHECK(progress_line({0, 10, 2000}, "x") ==
          "x 0/10 (0.00%) elapsed=0:00:02 eta=--:--:--");
}

TEST_CASE("half-up rounding helper") {
    CHECK(ratio_hundredths(11788, 14) == 84200);
    CHECK(ratio_hundredths(48558, 21) == 231229);
    CHECK(ratio_hundredths(186213, 40) == 465532);
    CHECK(ratio_hundredths(1, 8) == 13);   // 12.5 hundredths, half goes up
    CHECK(ratio_hundredths(1, 16) == 6);   // 6.25 hundredths, below half
    CHECK(format_hundredths(84200) == "842.00");
    CHECK(format_hundredths(231229) == "2312.29");
    CHECK(format_hundredths(7499) == "74.99");
    CHECK(format_hundredths(5) == "0.05");
}
