#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "crossflow/errors.hpp"
#include "crossflow/vector_store.hpp"
#include "helpers.hpp"

using namespace crossflow;

namespace {

/// Brute-force oracle: independent exhaustive scan with its own cosine.
std::vector<RetrievalHit> oracle_top_k(const std::vector<std::pair<std::string, Embedding>>& entries,
                                       const Embedding& query, std::size_t k) {
    auto oracle_cosine = [](const Embedding& a, const Embedding& b) {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        double na = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) na += a[i] * a[i];
        double nb = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) nb += b[i] * b[i];
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    };

    std::vector<RetrievalHit> hits;
    for (const auto& [id, vec] : entries) {
        hits.push_back(RetrievalHit{id, oracle_cosine(query, vec), ""});
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

Embedding random_unit_vector(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Embedding v(dim);
    double norm_sq = 0.0;
    do {
        norm_sq = 0.0;
        for (auto& x : v) {
            x = dist(rng);
            norm_sq += x * x;
        }
    } while (norm_sq == 0.0);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& x : v) x *= inv;
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("vector_store");

TEST_CASE("insert, replace, and self-retrieval") {
    VectorStore store(2);
    store.insert("a", "text a", Embedding{1.0, 0.0});
    store.insert("b", "text b", Embedding{0.0, 1.0});
    CHECK(store.size() == 2);

    const auto hits = store.top_k(Embedding{1.0, 0.0}, 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].chunk_id == "a");
    CHECK(hits[0].score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hits[0].text == "text a");

    store.insert("a", "updated", Embedding{0.0, 1.0});
    CHECK(store.size() == 2);  // replace, not grow
    const auto hits2 = store.top_k(Embedding{0.0, 1.0}, 2);
    REQUIRE(hits2.size() == 2);
    CHECK(hits2[0].chunk_id == "a");  // tie broken by id ascending
    CHECK(hits2[1].chunk_id == "b");

    CHECK_THROWS_AS(store.insert("c", "bad", Embedding{1.0, 2.0, 3.0}), UsageError);
    CHECK_THROWS_AS(store.top_k(Embedding{1.0}, 1), UsageError);
}

TEST_CASE("top_k edge cases") {
    VectorStore empty(3);
    CHECK(empty.top_k(Embedding{1.0, 0.0, 0.0}, 5).empty());

    VectorStore store(2);
    for (int i = 0; i < 4; ++i) {
        store.insert("c" + std::to_string(i), "", Embedding{1.0, static_cast<double>(i)});
    }
    CHECK(store.top_k(Embedding{1.0, 0.0}, 100).size() == 4);  // k > size yields all
}

TEST_CASE("top_k equals the brute-force oracle on random instances") {
    std::mt19937 rng(20240229);
    const std::size_t dim = 64;
    const std::size_t n = 300;

    VectorStore store(dim);
    std::vector<std::pair<std::string, Embedding>> entries;
    for (std::size_t i = 0; i < n; ++i) {
        std::string id = "chunk" + std::to_string(i);
        Embedding v = random_unit_vector(rng, dim);
        store.insert(id, "", v);
        entries.emplace_back(std::move(id), std::move(v));
    }

    for (int q = 0; q < 25; ++q) {
        const Embedding query = random_unit_vector(rng, dim);
        for (std::size_t k : {1u, 5u, 17u}) {
            const auto got = store.top_k(query, k);
            const auto want = oracle_top_k(entries, query, k);
            REQUIRE(got.size() == want.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].chunk_id == want[i].chunk_id);
                CHECK(got[i].score == want[i].score);  // exact, same arithmetic
            }
        }
    }
}

TEST_CASE("save/load round-trips bit-exactly") {
    std::mt19937 rng(5150);
    testutil::TempDir tmp;
    const auto path = tmp.path() / "index.jsonl";

    VectorStore store(16);
    for (int i = 0; i < 40; ++i) {
        store.insert("doc#" + std::to_string(i), "token text " + std::to_string(i),
                     random_unit_vector(rng, 16));
    }
    store.save(path);
    const VectorStore loaded = VectorStore::load(path);
    CHECK(loaded.size() == store.size());
    CHECK(loaded.dim() == store.dim());

    for (int q = 0; q < 10; ++q) {
        const Embedding query = random_unit_vector(rng, 16);
        const auto a = store.top_k(query, 7);
        const auto b = loaded.top_k(query, 7);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].chunk_id == b[i].chunk_id);
            CHECK(a[i].score == b[i].score);  // vectors must round-trip exactly
            CHECK(a[i].text == b[i].text);
        }
    }

    // Saving the loaded store reproduces the file byte for byte.
    const auto path2 = tmp.path() / "index2.jsonl";
    loaded.save(path2);
    CHECK(testutil::read_file(path) == testutil::read_file(path2));
}

TEST_CASE("load failure modes") {
    testutil::TempDir tmp;

    SUBCASE("empty file loads as an empty store") {
        const auto path = tmp.path() / "empty.jsonl";
        testutil::write_file(path, "");
        const VectorStore store = VectorStore::load(path);
        CHECK(store.size() == 0);
        CHECK(store.top_k(Embedding{1.0, 0.0}, 3).empty());
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(VectorStore::load(tmp.path() / "missing.jsonl"), IoError);
    }
    SUBCASE("truncated record reports its line number, no partial store") {
        const auto path = tmp.path() / "broken.jsonl";
        VectorStore store(2);
        store.insert("a", "x", Embedding{1.0, 0.0});
        store.insert("b", "y", Embedding{0.0, 1.0});
        store.save(path);

        std::string content = testutil::read_file(path);
        content.resize(content.find('\n') + 6);  // cut partway into the second record
        testutil::write_file(path, content);
        try {
            VectorStore::load(path);
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("unexpected field rejected") {
        const auto path = tmp.path() / "extra.jsonl";
        testutil::write_file(path,
                             R"({"chunk_id":"a","text":"x","vector":[1.0,0.0],"surprise":1})"
                             "\n");
        CHECK_THROWS_AS(VectorStore::load(path), IoError);
    }
    SUBCASE("dimension disagreement rejected") {
        const auto path = tmp.path() / "dims.jsonl";
        testutil::write_file(path, R"({"chunk_id":"a","text":"x","vector":[1.0,0.0]})"
                                   "\n"
                                   R"({"chunk_id":"b","text":"y","vector":[1.0]})"
                                   "\n");
        CHECK_THROWS_AS(VectorStore::load(path), IoError);
    }
}

TEST_SUITE_END();
