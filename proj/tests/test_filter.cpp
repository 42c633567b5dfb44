#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "taxoforge/errors.hpp"
#include "taxoforge/filter.hpp"
#include "test_util.hpp"

using namespace taxoforge;
using namespace taxoforge::testing;

TEST_CASE("normalize_scores sorts descending with label tie-break") {
    auto c = normalize_scores({{"zebra", 0.5}, {"apple", 0.5}, {"top", 0.9}});
    REQUIRE(c.scores.size() == 3);
    CHECK(c.scores[0].first == "top");
    CHECK(c.scores[1].first == "apple");
    CHECK(c.scores[2].first == "zebra");
}

TEST_CASE("normalize_scores drops duplicate labels keeping the best") {
    auto c = normalize_scores({{"bird", 0.2}, {"bird", 0.8}, {"cat", 0.5}});
    REQUIRE(c.scores.size() == 2);
    CHECK(c.scores[0].first == "bird");
    CHECK(c.scores[0].second == 0.8);
}

TEST_CASE("normalize_scores output is always valid, any input order") {
    std::mt19937 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, double>> raw;
        std::uniform_int_distribution<int> n(0, 10), label(0, 5);
        std::uniform_real_distribution<double> score(0, 1);
        const int count = n(rng);
        for (int i = 0; i < count; ++i)
            raw.emplace_back("l" + std::to_string(label(rng)), score(rng));
        auto c = normalize_scores(raw);
        for (size_t i = 1; i < c.scores.size(); ++i) {
            CHECK((c.scores[i - 1].second > c.scores[i].second ||
                   (c.scores[i - 1].second == c.scores[i].second &&
                    c.scores[i - 1].first < c.scores[i].first)));
            for (size_t j = 0; j < i; ++j) CHECK(c.scores[j].first != c.scores[i].first);
        }
    }
}

TEST_CASE("constant backend") {
    ConstantBackend backend({{"bird", 0.9}, {"not bird", 0.1}});
    auto c = backend.classify("/nonexistent.jpg");
    REQUIRE(c.scores.size() == 2);
    CHECK(c.scores[0].first == "bird");
    CHECK(c.scores[0].second == 0.9);
}

TEST_CASE("accept thresholding") {
    Classification birdy = normalize_scores({{"bird", 0.9}, {"not bird", 0.1}});
    CHECK(accept(birdy, "bird", 0.5));
    CHECK(accept(normalize_scores({{"bird", 0.5}}), "bird", 0.5));  // inclusive
    CHECK(!accept(normalize_scores({{"not bird", 1.0}}), "bird", 0.5));
    CHECK(!accept(normalize_scores({}), "bird", 0.0));
}

TEST_CASE("accept is monotone in the threshold") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> d(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        auto c = normalize_scores({{"bird", d(rng)}, {"other", d(rng)}});
        double t1 = d(rng), t2 = d(rng);
        if (t1 > t2) std::swap(t1, t2);
        if (accept(c, "bird", t2)) CHECK(accept(c, "bird", t1));
    }
}

TEST_CASE("oracle backend answers from the sidecar manifest") {
    TempDir dir("oracle");
    write_file(dir.path / "manifest.json",
               std::string(R"({"a.jpg": "not bird", "b.jpg": "bird"})"));
    OracleBackend backend(dir.path / "manifest.json", {"bird", "not bird"});

    auto a = backend.classify(dir.path / "a.jpg");
    CHECK(a.scores[0].first == "not bird");
    CHECK(a.scores[0].second == 1.0);
    CHECK(a.scores[1].first == "bird");
    CHECK(a.scores[1].second == 0.0);

    auto b = backend.classify(dir.path / "b.jpg");
    CHECK(b.scores[0].first == "bird");

    CHECK_THROWS_AS(backend.classify(dir.path / "unknown.jpg"), BackendFailure);
}

TEST_CASE("external command backend speaks the line protocol") {
    CommandBackend backend("scripts/echo_classifier.py", "/nonexistent-model");
    auto c = backend.classify("/tmp/whatever.jpg");
    REQUIRE(c.scores.size() == 2);
    CHECK(c.scores[0].first == "bird");
    CHECK(c.scores[0].second == doctest::Approx(0.73));
    CHECK(c.scores[1].first == "not bird");
    CHECK(c.scores[1].second == doctest::Approx(0.27));

    // the session stays up across requests
    auto again = backend.classify("/tmp/another.jpg");
    CHECK(again.scores[0].first == "bird");
}

TEST_CASE("external command backend honors a model file") {
    TempDir dir("model");
    write_file(dir.path / "model.txt", std::string("duck\t0.6\ngoose\t0.4\n"));
    CommandBackend backend("scripts/echo_classifier.py", (dir.path / "model.txt").string());
    auto c = backend.classify("/tmp/x.jpg");
    REQUIRE(c.scores.size() == 2);
    CHECK(c.scores[0].first == "duck");
}

TEST_CASE("command backend failure surfaces as BackendFailure") {
    CommandBackend backend("/bin/false", "");
    CHECK_THROWS_AS(backend.classify("/tmp/x.jpg"), BackendFailure);
}
