#include <doctest.h>

#include <random>

#include "bhv/metrics.hpp"
#include "test_support.hpp"

using namespace bhv;
using bhv_test::portable_shuffle;

namespace {

EvalRecord rec(const std::string& qid, int budget, int sample, bool correct, int tokens) {
    EvalRecord r;
    r.question_id = qid;
    r.budget = budget;
    r.sample_index = sample;
    r.correct = correct;
    r.output_tokens = tokens;
    return r;
}

// Enumeration oracle for pass@k: fraction of k-subsets of n runs that
// contain at least one of the c correct runs, counted exhaustively over
// bitmasks (the first c runs are the correct ones, wlog).
double pass_at_k_enumerated(int n, int c, int k) {
    long total = 0;
    long passing = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        ++total;
        if (c > 0 && (mask & ((1u << c) - 1)) != 0) ++passing;
    }
    return static_cast<double>(passing) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("accuracy averages correctness and tokens") {
    std::vector<EvalRecord> records = {rec("q1", 1024, 0, true, 100),
                                       rec("q1", 1024, 1, true, 200),
                                       rec("q2", 1024, 0, true, 300),
                                       rec("q2", 1024, 1, false, 400)};
    CurvePoint p = accuracy(records);
    CHECK(p.mean_accuracy == doctest::Approx(0.75));
    CHECK(p.mean_output_tokens == doctest::Approx(250.0));
    CHECK(p.n_questions == 2);
    CHECK(p.n_samples == 2);
    CHECK(p.budget == 1024);

    std::vector<EvalRecord> all = {rec("q1", 8, 0, true, 1)};
    CHECK(accuracy(all).mean_accuracy == doctest::Approx(1.0));
    CHECK_THROWS_AS(accuracy({}), Error);
}

TEST_CASE("synthetic 80-run fixture matches the hand-computed mean") {
    // Three questions with 20, 40, and 60 correct runs out of 80:
    // expected mean = (20 + 40 + 60) / 240 = 0.5.
    std::vector<EvalRecord> records;
    int per_q[3] = {20, 40, 60};
    for (int q = 0; q < 3; ++q) {
        for (int s = 0; s < 80; ++s) {
            records.push_back(rec("q" + std::to_string(q), 2048, s, s < per_q[q], 500));
        }
    }
    CurvePoint p = accuracy(records);
    CHECK(p.mean_accuracy == doctest::Approx(0.5));
    CHECK(p.n_questions == 3);
    CHECK(p.n_samples == 80);
}

TEST_CASE("accuracy of a concatenation is the weighted mean of parts") {
    std::mt19937 rng(31);
    std::vector<EvalRecord> a, b;
    for (int i = 0; i < 37; ++i) a.push_back(rec("qa", 64, i, rng() % 2 == 0, 10));
    for (int i = 0; i < 53; ++i) b.push_back(rec("qb", 64, i, rng() % 3 == 0, 20));
    std::vector<EvalRecord> both = a;
    both.insert(both.end(), b.begin(), b.end());
    double weighted = (accuracy(a).mean_accuracy * 37 + accuracy(b).mean_accuracy * 53) / 90;
    CHECK(accuracy(both).mean_accuracy == doctest::Approx(weighted).epsilon(1e-12));
}

TEST_CASE("pass_at_k_sets over consecutive blocks") {
    std::vector<bool> none(80, false);
    CHECK(pass_at_k_sets(none, 16, 5) == doctest::Approx(0.0));

    std::vector<bool> one_per_block(80, false);
    for (int s = 0; s < 5; ++s) one_per_block[s * 16 + 3] = true;
    CHECK(pass_at_k_sets(one_per_block, 16, 5) == doctest::Approx(1.0));

    // One correct run among 80: exactly one of five blocks passes.
    std::vector<bool> single(80, false);
    single[37] = true;
    CHECK(pass_at_k_sets(single, 16, 5) == doctest::Approx(0.2));

    CHECK_THROWS_AS(pass_at_k_sets(std::vector<bool>(79, false), 16, 5), Error);
    CHECK_THROWS_AS(pass_at_k_sets(none, 0, 5), Error);
}

TEST_CASE("pass_at_k_unbiased matches closed form and enumeration") {
    // C(4,2) = 6 subsets; 5 of them contain a correct run.
    CHECK(std::abs(pass_at_k_unbiased(4, 2, 2) - 5.0 / 6.0) < 1e-12);
    CHECK(pass_at_k_unbiased(10, 0, 4) == 0.0);
    CHECK(pass_at_k_unbiased(10, 10, 4) == 1.0);
    CHECK_THROWS_AS(pass_at_k_unbiased(4, 5, 2), Error);
    CHECK_THROWS_AS(pass_at_k_unbiased(4, 2, 0), Error);
    CHECK_THROWS_AS(pass_at_k_unbiased(4, 2, 5), Error);

    for (int n = 1; n <= 10; ++n) {
        for (int c = 0; c <= n; ++c) {
            for (int k = 1; k <= n; ++k) {
                CHECK(pass_at_k_unbiased(n, c, k) ==
                      doctest::Approx(pass_at_k_enumerated(n, c, k)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("pass_at_k_unbiased is monotone in c and k") {
    for (int n = 1; n <= 20; ++n) {
        for (int k = 1; k <= n; ++k) {
            double prev = -1.0;
            for (int c = 0; c <= n; ++c) {
                double cur = pass_at_k_unbiased(n, c, k);
                CHECK(cur >= prev);
                prev = cur;
            }
        }
        for (int c = 0; c <= n; ++c) {
            double prev = -1.0;
            for (int k = 1; k <= n; ++k) {
                double cur = pass_at_k_unbiased(n, c, k);
                CHECK(cur >= prev);
                prev = cur;
            }
        }
    }
}

TEST_CASE("set method converges to the unbiased estimator under shuffling") {
    std::mt19937 rng(404);
    for (int c : {3, 11, 40}) {
        std::vector<bool> v(80, false);
        for (int i = 0; i < c; ++i) v[i] = true;
        double expect = pass_at_k_unbiased(80, c, 16);
        double sum = 0.0;
        const int shuffles = 2000;
        for (int s = 0; s < shuffles; ++s) {
            portable_shuffle(v, rng);
            sum += pass_at_k_sets(v, 16, 5);
        }
        CHECK(sum / shuffles == doctest::Approx(expect).epsilon(0.03));
    }
}

TEST_CASE("correctness_by_question restores sample order") {
    std::vector<EvalRecord> records = {rec("q", 8, 2, true, 1), rec("q", 8, 0, false, 1),
                                       rec("q", 8, 1, false, 1)};
    auto grouped = correctness_by_question(records);
    REQUIRE(grouped.count("q") == 1);
    CHECK(grouped["q"] == std::vector<bool>{false, false, true});
}

TEST_CASE("token_savings arithmetic and guards") {
    std::vector<CurvePoint> a(1), b(1);
    a[0] = {2048, 0.8, 540.0, 3, 80};
    b[0] = {2048, 0.8, 1000.0, 3, 80};
    auto rows = token_savings(a, b);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].savings_fraction == doctest::Approx(0.46).epsilon(1e-12));
    CHECK(rows[0].matches_or_improves);

    auto zero = token_savings(b, b);
    CHECK(zero[0].savings_fraction == doctest::Approx(0.0));
    CHECK(zero[0].accuracy_delta == doctest::Approx(0.0));

    a[0].mean_accuracy = 0.7;
    CHECK_FALSE(token_savings(a, b)[0].matches_or_improves);

    std::vector<CurvePoint> mismatched(1);
    mismatched[0] = {4096, 0.5, 100.0, 1, 1};
    CHECK_THROWS_AS(token_savings(a, mismatched), Error);
    CHECK_THROWS_AS(token_savings(a, {}), Error);
}

TEST_CASE("grade_run_log demands references and known questions") {
    std::vector<Question> corpus(1);
    corpus[0].id = "q1";
    corpus[0].text = "t";
    corpus[0].reference_answer = "5";

    Trace t;
    t.question_id = "q1";
    t.text = "\\boxed{5}";
    t.budget = 64;
    t.output_tokens = 1;
    auto records = grade_run_log({t}, corpus, Method::bci);
    REQUIRE(records.size() == 1);
    CHECK(records[0].correct);
    CHECK(records[0].method == Method::bci);

    Trace unknown = t;
    unknown.question_id = "nope";
    CHECK_THROWS_AS(grade_run_log({unknown}, corpus, Method::bci), Error);

    // Duplicate (question, budget, sample) entries are malformed logs.
    CHECK_THROWS_AS(grade_run_log({t, t}, corpus, Method::bci), Error);

    corpus[0].reference_answer.reset();
    CHECK_THROWS_AS(grade_run_log({t}, corpus, Method::bci), Error);
}
