#include <doctest.h>

#include <random>

#include "crossflow/corpus.hpp"
#include "crossflow/errors.hpp"
#include "helpers.hpp"

using namespace crossflow;

TEST_SUITE_BEGIN("corpus");

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs") {
    CHECK(tokenize("The cat sat.") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("AI-driven,   AI") == std::vector<std::string>{"ai", "driven", "ai"});
    CHECK(tokenize("  \t\n ") == std::vector<std::string>{});
    CHECK(tokenize("a1b2 C3") == std::vector<std::string>{"a1b2", "c3"});
}

TEST_CASE("tokenize is idempotent on its own joined output") {
    std::mt19937 rng(20240601);
    std::uniform_int_distribution<int> len_dist(0, 60);
    std::uniform_int_distribution<int> char_dist(32, 126);
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i) text.push_back(static_cast<char>(char_dist(rng)));
        const auto tokens = tokenize(text);
        const auto again = tokenize(join_tokens(tokens));
        CHECK(again == tokens);
    }
}

namespace {

Document doc_of_n_tokens(std::size_t n) {
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < n; ++i) tokens.push_back("w" + std::to_string(i));
    Document doc;
    doc.doc_id = "doc";
    doc.domain = "test";
    doc.text = join_tokens(tokens);
    return doc;
}

}  // namespace

TEST_CASE("chunk_document window layout") {
    SUBCASE("10 tokens, chunk: 4, overlap 1") {
        const auto chunks = chunk_document(doc_of_n_tokens(10), 4, 1);
        REQUIRE(chunks.size() == 3);
        CHECK(chunks[0].span.begin == 0);
        CHECK(chunks[0].span.end == 4);
        CHECK(chunks[1].span.begin == 3);
        CHECK(chunks[1].span.end == 7);
        CHECK(chunks[2].span.begin == 6);
        CHECK(chunks[2].span.end == 10);
        CHECK(chunks[0].chunk_id == "doc#0");
        CHECK(chunks[2].chunk_id == "doc#2");
        CHECK(chunks[0].text == "w0 w1 w2 w3");
    }
    SUBCASE("empty document") {
        CHECK(chunk_document(doc_of_n_tokens(0), 4, 1).empty());
    }
    SUBCASE("document shorter than the window") {
        const auto chunks = chunk_document(doc_of_n_tokens(3), 4, 1);
        REQUIRE(chunks.size() == 1);
        CHECK(chunks[0].span.begin == 0);
        CHECK(chunks[0].span.end == 3);
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(chunk_document(doc_of_n_tokens(3), 4, 4), ConfigError);
        CHECK_THROWS_AS(chunk_document(doc_of_n_tokens(3), 0, 0), ConfigError);
        CHECK_THROWS_AS(chunk_document(doc_of_n_tokens(3), 2, 5), ConfigError);
    }
}

TEST_CASE("chunking reconstructs the token stream and matches the count formula") {
    std::mt19937 rng(911);
    std::uniform_int_distribution<std::size_t> n_dist(0, 300);
    std::uniform_int_distribution<std::size_t> size_dist(1, 40);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = n_dist(rng);
        const std::size_t chunk_size = size_dist(rng);
        const std::size_t overlap =
            chunk_size == 1 ? 0 : std::uniform_int_distribution<std::size_t>(0, chunk_size - 1)(rng);

        const Document doc = doc_of_n_tokens(n);
        const auto expected_tokens = tokenize(doc.text);
        const auto chunks = chunk_document(doc, chunk_size, overlap);

        // Count formula: max(1 if tokens>0 else 0, ceil((n - overlap) / stride)).
        const std::size_t stride = chunk_size - overlap;
        std::size_t expected_count = 0;
        if (n > 0) {
            expected_count = n > overlap ? (n - overlap + stride - 1) / stride : 1;
            expected_count = std::max<std::size_t>(expected_count, 1);
        }
        CHECK(chunks.size() == expected_count);

        // De-overlapped concatenation reproduces the stream.
        std::vector<std::string> rebuilt;
        for (std::size_t i = 0; i < chunks.size(); ++i) {
            const auto tokens = tokenize(chunks[i].text);
            const std::size_t skip = i == 0 ? 0 : overlap;
            REQUIRE(tokens.size() >= skip);
            rebuilt.insert(rebuilt.end(), tokens.begin() + static_cast<long>(skip), tokens.end());
            CHECK(tokens.size() <= chunk_size);
            CHECK(chunks[i].span.begin < chunks[i].span.end);
        }
        CHECK(rebuilt == expected_tokens);
    }
}

TEST_CASE("load_corpus orders documents and keeps relative ids") {
    testutil::TempDir tmp;
    testutil::write_file(tmp.path() / "b.txt", "beta");
    testutil::write_file(tmp.path() / "a.txt", "alpha");
    testutil::write_file(tmp.path() / "sub" / "c.txt", "gamma");

    const auto docs = load_corpus(tmp.path(), "demo");
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].doc_id == "a.txt");
    CHECK(docs[1].doc_id == "b.txt");
    CHECK(docs[2].doc_id == "sub/c.txt");
    CHECK(docs[0].text == "alpha");
    CHECK(docs[2].domain == "demo");
}

TEST_CASE("load_corpus edge cases") {
    SUBCASE("empty directory") {
        testutil::TempDir tmp;
        CHECK(load_corpus(tmp.path(), "demo").empty());
    }
    SUBCASE("missing directory") {
        CHECK_THROWS_AS(load_corpus("/nonexistent/corpus/dir", "demo"), IoError);
    }
    SUBCASE("unreadable file names the file") {
        testutil::TempDir tmp;
        std::filesystem::create_symlink(tmp.path() / "gone.txt", tmp.path() / "broken.txt");
        try {
            load_corpus(tmp.path(), "demo");
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("broken.txt") != std::string::npos);
        }
    }
}

TEST_SUITE_END();
