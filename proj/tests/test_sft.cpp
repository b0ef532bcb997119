#include <doctest.h>

#include "bhv/sft.hpp"
#include "bhv/util.hpp"
#include "test_support.hpp"

using namespace bhv;
using bhv_test::FakeProvider;
using bhv_test::TempDir;

namespace {

std::vector<Question> two_questions() {
    std::vector<Question> qs(2);
    qs[0].id = "q1";
    qs[0].text = "first question";
    qs[0].reference_answer = "4";
    qs[1].id = "q2";
    qs[1].text = "second question";
    qs[1].reference_answer = "9";
    return qs;
}

Handbook handbook_for(const std::vector<Question>& qs) {
    Handbook hb;
    std::vector<Behavior> batch;
    for (const Question& q : qs) {
        Behavior b;
        b.name = "hint_" + q.id;
        b.instruction = "hint for " + q.id;
        b.source_question_id = q.id;
        b.source_trace_id = q.id + ".t0.sol";
        batch.push_back(b);
    }
    hb.append(batch);
    return hb;
}

FakeProvider teacher_provider() {
    FakeProvider p;
    p.on_complete = [](const ChatRequest& req) {
        const std::string& prompt = req.messages[0].content;
        ChatResponse r;
        std::string which = prompt.find("first question") != std::string::npos ? "4" : "9";
        if (prompt.find("Behaviors:") != std::string::npos) {
            r.text = "conditioned reasoning citing hint_q" +
                     std::string(which == "4" ? "1" : "2") + " \\boxed{" + which + "}";
        } else {
            r.text = "plain reasoning \\boxed{" + which + "}";
        }
        r.output_tokens = count_words(r.text);
        return r;
    };
    return p;
}

}  // namespace

TEST_CASE("bc dataset builds one conditioned pair per question") {
    FakeProvider p = teacher_provider();
    auto questions = two_questions();
    Handbook hb = handbook_for(questions);
    RunConfig cfg;
    cfg.budget = 14000;
    SftBuildResult result = build_bc_dataset(p, PromptSet::defaults(), questions, hb, cfg);
    REQUIRE(result.pairs.size() == 2);
    CHECK(result.report.built == 2);
    for (const SftPair& pair : result.pairs) {
        CHECK(pair.variant == SftVariant::BC);
        REQUIRE(pair.teacher_behavior_names.size() == 1);
        CHECK(pair.teacher_behavior_names[0] == "hint_" + pair.question_id);
        // The response is the response only; the behavior block lives in
        // the prompt.
        CHECK(pair.response_text.find(pair.teacher_behavior_names[0] + ": ") ==
              std::string::npos);
    }
    // Teacher prompts were behavior-conditioned at the configured budget
    // and name the question's own behaviors.
    auto reqs = p.requests();
    REQUIRE(reqs.size() == 2);
    for (const auto& req : reqs) {
        CHECK(req.max_tokens == 14000);
        CHECK(req.messages[0].content.find("Behaviors:") != std::string::npos);
        bool has_hint = req.messages[0].content.find("hint_q1: ") != std::string::npos ||
                        req.messages[0].content.find("hint_q2: ") != std::string::npos;
        CHECK(has_hint);
    }
}

TEST_CASE("questions without curated behaviors are skipped with a warning") {
    FakeProvider p = teacher_provider();
    auto questions = two_questions();
    Question orphan;
    orphan.id = "q3";
    orphan.text = "third question";
    questions.push_back(orphan);
    Handbook hb = handbook_for(two_questions());
    RunConfig cfg;
    cfg.budget = 1000;
    SftBuildResult result = build_bc_dataset(p, PromptSet::defaults(), questions, hb, cfg);
    CHECK(result.pairs.size() == 2);
    REQUIRE(result.report.skipped.size() == 1);
    CHECK(result.report.skipped[0] == "q3");
}

TEST_CASE("sft dataset pairs are unconditioned") {
    FakeProvider p = teacher_provider();
    auto questions = two_questions();
    RunConfig cfg;
    cfg.budget = 1000;
    SftBuildResult result = build_sft_dataset(p, PromptSet::defaults(), questions, cfg);
    REQUIRE(result.pairs.size() == 2);
    for (const SftPair& pair : result.pairs) {
        CHECK(pair.variant == SftVariant::SFT);
        CHECK(pair.teacher_behavior_names.empty());
    }
    for (const auto& req : p.requests()) {
        CHECK(req.messages[0].content.find("Behaviors:") == std::string::npos);
    }
}

TEST_CASE("export and validate round trip") {
    FakeProvider p = teacher_provider();
    auto questions = two_questions();
    Handbook hb = handbook_for(questions);
    RunConfig cfg;
    cfg.budget = 500;
    SftBuildResult bc = build_bc_dataset(p, PromptSet::defaults(), questions, hb, cfg);

    TempDir dir("sft");
    export_dataset(bc.pairs, dir.file("bc.jsonl"));
    DatasetValidation v = validate_dataset(dir.file("bc.jsonl"), &questions);
    CHECK(v.ok());
    CHECK(v.total == 2);
    CHECK(v.bc_pairs == 2);
    CHECK(v.sft_pairs == 0);
    // Teacher answered both correctly in this script.
    REQUIRE(v.accuracy_bc.has_value());
    CHECK(*v.accuracy_bc == doctest::Approx(1.0));
    CHECK_FALSE(v.accuracy_sft.has_value());

    // Determinism: exporting again produces identical bytes.
    export_dataset(bc.pairs, dir.file("bc2.jsonl"));
    CHECK(bhv_test::slurp(dir.file("bc.jsonl")) == bhv_test::slurp(dir.file("bc2.jsonl")));
}

TEST_CASE("validation rejects BC responses that embed the behavior block") {
    TempDir dir("sft_leak");
    std::string leaky =
        R"({"prompt":"q","completion":"Here are the behaviors I used:\nhint_q1: hint for q1\nthen \\boxed{4}","meta":{"question_id":"q1","variant":"BC","teacher_behavior_names":["hint_q1"]}})"
        "\n"
        R"({"prompt":"q2","completion":"clean reasoning \\boxed{9}","meta":{"question_id":"q2","variant":"BC","teacher_behavior_names":["hint_q2"]}})"
        "\n";
    bhv_test::spit(dir.file("leaky.jsonl"), leaky);
    DatasetValidation v = validate_dataset(dir.file("leaky.jsonl"));
    CHECK_FALSE(v.ok());
    REQUIRE(v.violations.size() == 1);
    CHECK(v.violations[0].first == 1);
    CHECK(v.violations[0].second.find("behavior-list block") != std::string::npos);
}

TEST_CASE("validation accepts inline citations of behavior names") {
    TempDir dir("sft_cite");
    std::string fine =
        R"({"prompt":"q","completion":"As per the behavior hint_q1, I substitute directly. \\boxed{4}","meta":{"question_id":"q1","variant":"BC","teacher_behavior_names":["hint_q1"]}})"
        "\n";
    bhv_test::spit(dir.file("cite.jsonl"), fine);
    CHECK(validate_dataset(dir.file("cite.jsonl")).ok());
}

TEST_CASE("validation flags SFT pairs that carry behavior names") {
    TempDir dir("sft_names");
    std::string bad =
        R"({"prompt":"q","completion":"x \\boxed{1}","meta":{"question_id":"q1","variant":"SFT","teacher_behavior_names":["oops"]}})"
        "\n";
    bhv_test::spit(dir.file("bad.jsonl"), bad);
    DatasetValidation v = validate_dataset(dir.file("bad.jsonl"));
    CHECK_FALSE(v.ok());

    // export refuses to write such a pair in the first place.
    SftPair pair;
    pair.question_id = "q1";
    pair.question_text = "q";
    pair.response_text = "x";
    pair.variant = SftVariant::SFT;
    pair.teacher_behavior_names = {"oops"};
    CHECK_THROWS_AS(export_dataset({pair}, dir.file("never.jsonl")), Error);
}

TEST_CASE("export refuses leaky BC pairs") {
    TempDir dir("sft_refuse");
    SftPair pair;
    pair.question_id = "q1";
    pair.question_text = "q";
    pair.response_text = "restating:\n- my_hint: the hint text\n\\boxed{4}";
    pair.variant = SftVariant::BC;
    pair.teacher_behavior_names = {"my_hint"};
    CHECK_THROWS_WITH_AS(export_dataset({pair}, dir.file("never.jsonl")),
                         doctest::Contains("behavior block"), Error);
}
