#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "crowdrank/error.hpp"
#include "crowdrank/eval.hpp"
#include "oracles.hpp"

#ifdef CROWDRANK_HAVE_BOOST_MATH
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#endif

using namespace crowdrank;
using crowdrank::testing::ap_oracle;
using crowdrank::testing::p_at_k_oracle;

namespace {

std::vector<std::string> docs(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("d" + std::to_string(i));
    return out;
}

}  // namespace

TEST_CASE("average_precision examples") {
    Qrels q;
    q.set("Q", "a", 1);
    const std::vector<std::string> first{"a", "b", "c"}, second{"b", "a", "c"};
    CHECK(average_precision(first, q, "Q") == 1.0);
    CHECK(average_precision(second, q, "Q") == 0.5);

    Qrels two;
    two.set("Q", "a", 1);
    two.set("Q", "c", 2);
    two.set("Q", "b", 0);
    CHECK(average_precision(first, two, "Q") == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-15));
    // Unretrieved relevant documents still count in R.
    two.set("Q", "z", 1);
    CHECK(average_precision(first, two, "Q") == doctest::Approx((1.0 + 2.0 / 3.0) / 3.0).epsilon(1e-15));

    CHECK_THROWS_AS(average_precision(first, q, "other"), DegenerateInput);
}

TEST_CASE("average_precision stops at depth 1000") {
    Qrels q;
    q.set("Q", "d1000", 1);
    CHECK(average_precision(docs(1001), q, "Q") == 0.0);
    q.set("Q", "d999", 1);
    CHECK(average_precision(docs(1001), q, "Q") == doctest::Approx(0.5 / 1000.0));
}

TEST_CASE("precision_at_k examples") {
    Qrels q;
    auto d = docs(40);
    q.set("Q", "d0", 1);
    q.set("Q", "d10", 1);
    q.set("Q", "d29", 2);
    q.set("Q", "d30", 1);
    CHECK(precision_at_k(d, q, "Q") == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(precision_at_k({}, q, "Q") == 0.0);
    Qrels all;
    auto ten = docs(10);
    for (const auto& id : ten) all.set("Q", id, 1);
    CHECK(precision_at_k(ten, all, "Q") == doctest::Approx(10.0 / 30.0).epsilon(1e-15));
}

TEST_CASE("metrics equal a brute-force permutation oracle") {
    std::mt19937_64 gen(2024);
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t n = 1 + gen() % 6;
        auto pool = docs(n);
        Qrels q;
        std::size_t r = 0;
        for (const auto& id : pool) {
            const int grade = static_cast<int>(gen() % 3);
            q.set("Q", id, grade);
            r += grade > 0 ? 1 : 0;
        }
        if (gen() % 4 == 0) {
            q.set("Q", "unretrieved", 1);
            ++r;
        }
        std::sort(pool.begin(), pool.end());
        do {
            std::vector<bool> rel;
            for (const auto& id : pool) rel.push_back(q.grade("Q", id) > 0);
            CHECK(precision_at_k(pool, q, "Q") == p_at_k_oracle(rel, 30));
            if (r > 0) CHECK(average_precision(pool, q, "Q") == ap_oracle(rel, r));
        } while (std::next_permutation(pool.begin(), pool.end()));
    }
}

TEST_CASE("evaluate_run averages per-query values over judged queries") {
    Qrels q;
    q.set("A", "a1", 1);
    q.set("B", "b2", 1);
    q.set("C", "c1", 0);
    Run run;
    run["A"] = {{"a1", 2.0}, {"a2", 1.0}};
    run["B"] = {{"b1", 2.0}, {"b2", 1.0}};
    run["C"] = {{"c1", 1.0}};
    auto m = evaluate_run(run, q);
    CHECK(m.ap.size() == 2);
    CHECK(m.ap.at("A") == 1.0);
    CHECK(m.ap.at("B") == 0.5);
    CHECK(m.map == 0.75);
    CHECK(m.mean_p30 == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("paired t-test examples") {
    SUBCASE("hand computation") {
        const std::vector<double> a{2, 0, 1, 3}, b{0, 0, 0, 0};
        auto r = paired_t_test(a, b);
        CHECK(r.n == 4);
        CHECK(r.mean_diff == 1.5);
        CHECK(r.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
        CHECK(r.t_stat == doctest::Approx(1.5 / std::sqrt(5.0 / 12.0)).epsilon(1e-14));
        CHECK(r.t_stat == doctest::Approx(2.3238).epsilon(1e-4));
        CHECK(r.df == 3);
        CHECK(r.ci_low < r.mean_diff);
        CHECK(r.ci_high > r.mean_diff);
    }
    SUBCASE("published summary") {
        auto r = t_test_from_summary(55, 0.0281, 0.0020);
        CHECK(r.t_stat == doctest::Approx(4.66).epsilon(0.005));
        CHECK(r.df == 54);
        CHECK(r.effect_size == doctest::Approx(0.63).epsilon(0.01));
        CHECK(std::abs(r.ci_low - 0.0160) <= 0.0005);
        CHECK(std::abs(r.ci_high - 0.0402) <= 0.0005);
    }
    SUBCASE("degenerate and invalid") {
        const std::vector<double> a{0.1, 0.5, 0.9};
        std::vector<double> shifted = a;
        for (auto& v : shifted) v += 0.25;
        CHECK_THROWS_AS(paired_t_test(a, a), DegenerateInput);
        CHECK_THROWS_AS(paired_t_test(shifted, a), DegenerateInput);
        CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{0.0}), InvalidArgument);
        CHECK_THROWS_AS(paired_t_test(a, std::vector<double>{1.0, 2.0}), InvalidArgument);
    }
    SUBCASE("antisymmetry") {
        std::mt19937_64 gen(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> a(20), b(20);
            for (auto& v : a) v = u(gen);
            for (auto& v : b) v = u(gen);
            auto ab = paired_t_test(a, b);
            auto ba = paired_t_test(b, a);
            CHECK(ab.t_stat == doctest::Approx(-ba.t_stat).epsilon(1e-14));
            CHECK(ab.p_two_sided == doctest::Approx(ba.p_two_sided).epsilon(1e-12));
        }
    }
}

TEST_CASE("t-distribution special functions") {
    CHECK(student_t_cdf(0.0, 7.0) == doctest::Approx(0.5).epsilon(1e-15));
    // df = 1 is the Cauchy distribution.
    CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    for (double p : {0.9, 0.975, 0.995}) {
        for (double df : {3.0, 54.0, 199.0}) CHECK(student_t_cdf(student_t_quantile(p, df), df) == doctest::Approx(p));
    }
#ifdef CROWDRANK_HAVE_BOOST_MATH
    for (double a : {0.5, 1.5, 10.0, 27.0}) {
        for (double b : {0.5, 2.0, 13.0}) {
            for (double x : {0.01, 0.2, 0.5, 0.77, 0.99}) {
                CHECK(regularized_incomplete_beta(a, b, x) ==
                      doctest::Approx(boost::math::ibeta(a, b, x)).epsilon(1e-10));
            }
        }
    }
    for (double df : {1.0, 3.0, 9.0, 54.0, 99.0, 199.0}) {
        boost::math::students_t dist(df);
        for (double t : {-12.0, -3.1, -0.4, 0.0, 0.9, 2.3238, 4.66, 11.0}) {
            CHECK(student_t_cdf(t, df) == doctest::Approx(boost::math::cdf(dist, t)).epsilon(1e-10));
        }
        CHECK(student_t_quantile(0.975, df) == doctest::Approx(boost::math::quantile(dist, 0.975)).epsilon(1e-9));
    }
    // p-values from the report agree with the reference distribution.
    auto r = t_test_from_summary(55, 0.0281, 0.0020);
    boost::math::students_t d54(54.0);
    CHECK(r.p_two_sided == doctest::Approx(2.0 * boost::math::cdf(boost::math::complement(d54, r.t_stat))).epsilon(1e-9));
#endif
}

TEST_CASE("run file format") {
    Run run;
    run["MB225"] = {{"d1", 0.7}};
    std::ostringstream out;
    write_run(out, run, "rmts");
    CHECK(out.str() == "MB225 Q0 d1 1 0.7 rmts\n");

    SUBCASE("round-trip") {
        std::mt19937_64 gen(6);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        Run big;
        for (int q = 0; q < 15; ++q) {
            auto& list = big["Q" + std::to_string(q)];
            for (int i = 0; i < 40; ++i) list.push_back({"doc" + std::to_string(i), i % 7 == 0 ? 1.0 : u(gen)});
        }
        sort_run(big);
        std::ostringstream o;
        write_run(o, big, "tag1");
        std::istringstream in(o.str());
        auto parsed = parse_run(in);
        CHECK(parsed.tag == "tag1");
        CHECK(parsed.run == big);
    }
    SUBCASE("rank inconsistent with score order") {
        std::istringstream in("Q Q0 a 1 0.5 t\nQ Q0 b 2 0.9 t\n");
        try {
            parse_run(in, "r.txt");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("other malformed lines") {
        std::istringstream gap("Q Q0 a 1 0.9 t\nQ Q0 b 3 0.5 t\n");
        CHECK_THROWS_AS(parse_run(gap), ParseError);
        std::istringstream fields("Q Q0 a 1 0.9\n");
        CHECK_THROWS_AS(parse_run(fields), ParseError);
        std::istringstream dup("Q Q0 a 1 0.9 t\nQ Q0 a 2 0.5 t\n");
        CHECK_THROWS_AS(parse_run(dup), ParseError);
        std::istringstream tags("Q Q0 a 1 0.9 t\nQ Q0 b 2 0.5 u\n");
        CHECK_THROWS_AS(parse_run(tags), ParseError);
        std::istringstream q0("Q X a 1 0.9 t\n");
        CHECK_THROWS_AS(parse_run(q0), ParseError);
    }
    SUBCASE("writer rejects unordered lists and bad tags") {
        Run bad;
        bad["Q"] = {{"a", 0.1}, {"b", 0.9}};
        std::ostringstream o;
        CHECK_THROWS_AS(write_run(o, bad, "t"), InvalidArgument);
        CHECK_THROWS_AS(write_run(o, run, "two words"), InvalidArgument);
    }
}

TEST_CASE("qrels round-trip and errors") {
    Qrels q;
    q.set("MB1", "d1", 2);
    q.set("MB1", "d2", 0);
    q.set("MB2", "d9", 1);
    std::ostringstream out;
    write_qrels(out, q);
    std::istringstream in(out.str());
    auto back = parse_qrels(in);
    CHECK(back.judgments() == q.judgments());
    CHECK(back.num_relevant("MB1") == 1);
    CHECK(back.relevant("MB1", "d1"));
    CHECK_FALSE(back.relevant("MB1", "d2"));
    CHECK(back.grade("MB3", "x") == 0);
    std::istringstream bad("MB1 0 d1 7\n");
    CHECK_THROWS_AS(parse_qrels(bad), ParseError);
}
