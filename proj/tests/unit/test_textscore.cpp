#include <doctest.h>

#include <cmath>
#include <random>

#include "crowdrank/corpus.hpp"
#include "crowdrank/error.hpp"
#include "crowdrank/textscore.hpp"

using namespace crowdrank;

namespace {

std::string repeat(const std::string& word, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + word;
    return s;
}

}  // namespace

TEST_CASE("jaccard") {
    const TermSet a{"barbara", "walters", "chicken", "pox"};
    const TermSet b{"barbara", "walters", "recovering", "chicken", "pox"};
    CHECK(jaccard(a, a) == 1.0);
    CHECK(jaccard(a, {}) == 0.0);
    CHECK(jaccard({}, {}) == 0.0);
    CHECK(jaccard(a, b) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(term_set(tokenize("Pox pox POX")) == TermSet{"pox"});
}

TEST_CASE("jaccard is symmetric, bounded, and 1 only for equal sets") {
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> pick(0, 9), size(0, 6);
    for (int trial = 0; trial < 500; ++trial) {
        TermSet a, b;
        for (int i = size(gen); i > 0; --i) a.insert("w" + std::to_string(pick(gen)));
        for (int i = size(gen); i > 0; --i) b.insert("w" + std::to_string(pick(gen)));
        const double j = jaccard(a, b);
        CHECK(j == jaccard(b, a));
        CHECK(j >= 0.0);
        CHECK(j <= 1.0);
        CHECK((j == 1.0) == (a == b && !a.empty()));
    }
}

TEST_CASE("bm25_score") {
    auto idx = build_index({make_document("d1", 0, "x y"), make_document("d2", 0, "a b"),
                            make_document("d3", 0, "c d")});
    const auto& s = idx.stats();
    const auto& d1 = *idx.find("d1");
    CHECK(bm25_score({"q", "x", 0}, d1, s) == doctest::Approx(std::log(2.5 / 1.5)).epsilon(1e-12));
    CHECK(bm25_score({"q", "a", 0}, d1, s) == 0.0);

    // df=2 of N=3 gives a negative RSJ idf, floored to zero.
    auto idx2 = build_index({make_document("d1", 0, "x y"), make_document("d2", 0, "x b"),
                             make_document("d3", 0, "c d")});
    CHECK(bm25_score({"q", "x", 0}, *idx2.find("d1"), idx2.stats()) == 0.0);
}

TEST_CASE("bm25_score and idf_sum are non-decreasing in tf and matched terms") {
    std::vector<Document> docs;
    for (int tf = 0; tf <= 6; ++tf) docs.push_back(make_document("tf" + std::to_string(tf), 0,
                                                                 repeat("alpha", tf) + " " + repeat("pad", 8 - tf)));
    docs.push_back(make_document("both", 0, "alpha beta pad pad pad pad pad pad"));
    docs.push_back(make_document("one", 0, "alpha pad pad pad pad pad pad pad"));
    for (int i = 0; i < 20; ++i) docs.push_back(make_document("n" + std::to_string(i), 0, repeat("noise", 8)));
    auto idx = build_index(docs);
    const Query q{"q", "alpha beta", 0};
    double prev = -1.0;
    for (int tf = 0; tf <= 6; ++tf) {
        const double v = bm25_score(q, *idx.find("tf" + std::to_string(tf)), idx.stats());
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(bm25_score(q, *idx.find("both"), idx.stats()) >= bm25_score(q, *idx.find("one"), idx.stats()));
    CHECK(idf_sum(q, *idx.find("both"), idx.stats()) >= idf_sum(q, *idx.find("one"), idx.stats()));
}

TEST_CASE("lm_dirichlet_score") {
    // tf=1, dl=10, p(t|C) = 1/1000.
    std::vector<Document> docs{make_document("target", 0, "term " + repeat("pad", 9))};
    for (int i = 0; i < 99; ++i) docs.push_back(make_document("f" + std::to_string(i), 0, repeat("fill", 10)));
    auto idx = build_index(docs);
    REQUIRE(idx.stats().total_terms == 1000);
    const auto& target = *idx.find("target");
    CHECK(lm_dirichlet_score({"q", "term", 0}, target, idx.stats(), {2500.0}) ==
          doctest::Approx(std::log(3.5 / 2510.0)).epsilon(1e-12));

    // A term the document lacks contributes only its smoothing mass.
    const double p_fill = 990.0 / 1000.0;
    CHECK(lm_dirichlet_score({"q", "fill", 0}, target, idx.stats(), {2500.0}) ==
          doctest::Approx(std::log(2500.0 * p_fill / 2510.0)).epsilon(1e-12));

    // Unseen terms are dropped; nothing left is degenerate.
    CHECK(lm_dirichlet_score({"q", "term zzzz", 0}, target, idx.stats()) ==
          lm_dirichlet_score({"q", "term", 0}, target, idx.stats()));
    CHECK_THROWS_AS(lm_dirichlet_score({"q", "zzzz", 0}, target, idx.stats()), DegenerateInput);
}

TEST_CASE("lm_dirichlet_score ties identical profiles") {
    auto idx = build_index({make_document("a", 0, "x y z"), make_document("b", 5, "z y x"),
                            make_document("c", 0, "x x w")});
    const Query q{"q", "x y", 0};
    CHECK(lm_dirichlet_score(q, *idx.find("a"), idx.stats()) == lm_dirichlet_score(q, *idx.find("b"), idx.stats()));
}

TEST_CASE("idf_sum") {
    std::vector<Document> docs;
    for (int i = 0; i < 1000; ++i) {
        std::string text = i < 10 ? "t u" : "pad";
        docs.push_back(make_document("d" + std::to_string(i), 0, text));
    }
    auto idx = build_index(docs);
    const double one = std::log(1.0 + 990.5 / 10.5);
    CHECK(idf_sum({"q", "t", 0}, *idx.find("d0"), idx.stats()) == doctest::Approx(4.557).epsilon(1e-3));
    CHECK(idf_sum({"q", "t", 0}, *idx.find("d0"), idx.stats()) == doctest::Approx(one).epsilon(1e-14));
    CHECK(idf_sum({"q", "t u", 0}, *idx.find("d0"), idx.stats()) == doctest::Approx(2 * one).epsilon(1e-14));
    CHECK(idf_sum({"q", "t", 0}, *idx.find("d500"), idx.stats()) == 0.0);
}
