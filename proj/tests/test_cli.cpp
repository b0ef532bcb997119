#include <doctest.h>

#include <string>
#include <vector>

#include "bhv/cli.hpp"
#include "bhv/handbook.hpp"
#include "bhv/jsonl.hpp"
#include "bhv/sft.hpp"
#include "bhv/trace.hpp"
#include "test_support.hpp"

using namespace bhv;
using bhv_test::TempDir;

namespace {

const std::string kCorpus = std::string(BHV_FIXTURES_DIR) + "/demo_corpus.jsonl";
const std::string kMock = std::string(BHV_FIXTURES_DIR) + "/demo_mock.json";
const std::string kPrompts = BHV_PROMPTS_DIR;

int cli(std::vector<std::string> args) {
    std::vector<const char*> argv{"bhv"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("curate builds a handbook and report from the demo fixtures") {
    TempDir dir("cli_curate");
    std::string out = dir.file("handbook.jsonl").string();
    int rc = cli({"curate", "--corpus", kCorpus, "--prompts-dir", kPrompts,
                  "--n-traces", "1", "--budget", "64", "--out", out,
                  "--mock", kMock, "--seed", "0"});
    CHECK(rc == 0);
    Handbook hb = Handbook::load(out);
    REQUIRE(hb.size() == 3);
    CHECK(hb.find("hint_for_alpha") != nullptr);
    CHECK(hb.behaviors()[0].topic == "Algebra");

    Json report = Json::parse(bhv_test::slurp(out + ".report.json"));
    CHECK(report["total_inserted"] == 3);
    CHECK(report["questions"].size() == 3);

    // Identical rerun produces identical bytes.
    std::string out2 = dir.file("handbook2.jsonl").string();
    cli({"curate", "--corpus", kCorpus, "--prompts-dir", kPrompts, "--n-traces", "1",
         "--budget", "64", "--out", out2, "--mock", kMock, "--seed", "0"});
    CHECK(bhv_test::slurp(out) == bhv_test::slurp(out2));
}

TEST_CASE("missing corpus file exits 2 with error JSON") {
    TempDir dir("cli_missing");
    int rc = cli({"curate", "--corpus", dir.file("absent.jsonl").string(), "--out",
                  dir.file("h.jsonl").string(), "--mock", kMock});
    CHECK(rc == 2);
}

TEST_CASE("corpus with duplicate ids exits 2") {
    TempDir dir("cli_dupid");
    bhv_test::spit(dir.file("dup.jsonl"),
                   "{\"id\":\"q1\",\"text\":\"one\"}\n{\"id\":\"q1\",\"text\":\"two\"}\n");
    int rc = cli({"curate", "--corpus", dir.file("dup.jsonl").string(), "--out",
                  dir.file("h.jsonl").string(), "--mock", kMock});
    CHECK(rc == 2);
}

TEST_CASE("index is idempotent and retrieve ranks by similarity") {
    TempDir dir("cli_index");
    std::string hb = dir.file("handbook.jsonl").string();
    REQUIRE(cli({"curate", "--corpus", kCorpus, "--n-traces", "1", "--budget", "64",
                 "--out", hb, "--mock", kMock}) == 0);
    std::string idx = dir.file("index.jsonl").string();
    REQUIRE(cli({"index", "--handbook", hb, "--out", idx, "--mock", kMock}) == 0);
    std::string first = bhv_test::slurp(idx);
    CHECK(first.find("\"dim\":4") != std::string::npos);

    // Rebuild (now warm cache): byte-identical index and cache.
    std::string cache_before = bhv_test::slurp(idx + ".cache.jsonl");
    REQUIRE(cli({"index", "--handbook", hb, "--out", idx, "--mock", kMock}) == 0);
    CHECK(bhv_test::slurp(idx) == first);
    CHECK(bhv_test::slurp(idx + ".cache.jsonl") == cache_before);

    CHECK(cli({"retrieve", "--index", idx, "--query", "alpha problem", "--k", "2",
               "--mock", kMock}) == 0);
}

TEST_CASE("stale cache with a different dim exits 2") {
    TempDir dir("cli_cachedim");
    std::string hb = dir.file("handbook.jsonl").string();
    REQUIRE(cli({"curate", "--corpus", kCorpus, "--n-traces", "1", "--budget", "64",
                 "--out", hb, "--mock", kMock}) == 0);
    std::string idx = dir.file("index.jsonl").string();
    // Seed the default cache path with a 3-dim vector; the mock embeds in 4.
    bhv_test::spit(idx + ".cache.jsonl",
                   R"({"key":"00","text":"unrelated","vector":[1.0,0.0,0.0]})" "\n");
    int rc = cli({"index", "--handbook", hb, "--out", idx, "--mock", kMock});
    CHECK(rc == 2);
}

TEST_CASE("full pipeline: infer both modes, then report") {
    TempDir dir("cli_pipeline");
    std::string hb = dir.file("handbook.jsonl").string();
    std::string idx = dir.file("index.jsonl").string();
    REQUIRE(cli({"curate", "--corpus", kCorpus, "--n-traces", "1", "--budget", "64",
                 "--out", hb, "--mock", kMock}) == 0);
    REQUIRE(cli({"index", "--handbook", hb, "--out", idx, "--mock", kMock}) == 0);

    std::string bci_log = dir.file("bci.jsonl").string();
    std::string base_log = dir.file("baseline.jsonl").string();
    REQUIRE(cli({"infer", "--mode", "bci", "--corpus", kCorpus, "--handbook", hb,
                 "--index", idx, "--retrieval", "embedding", "--k", "1", "--budget",
                 "64", "--samples", "2", "--out", bci_log, "--mock", kMock}) == 0);
    REQUIRE(cli({"infer", "--mode", "baseline", "--corpus", kCorpus, "--budget", "64",
                 "--samples", "2", "--out", base_log, "--mock", kMock}) == 0);

    auto bci_traces = load_run_log(bci_log);
    REQUIRE(bci_traces.size() == 6);  // 3 questions x 2 samples
    CHECK(bci_traces[0].behavior_names == std::vector<std::string>{"hint_for_alpha"});
    CHECK(bci_traces[0].extracted_answer == "4");

    auto base_traces = load_run_log(base_log);
    REQUIRE(base_traces.size() == 6);
    CHECK(base_traces[0].behavior_names.empty());

    std::string csv = dir.file("report.csv").string();
    std::string js = dir.file("report.json").string();
    REQUIRE(cli({"report", "--baseline", base_log, "--bci", bci_log, "--corpus", kCorpus,
                 "--out-csv", csv, "--out-json", js}) == 0);
    Json report = Json::parse(bhv_test::slurp(js));
    // Demo script: conditioned runs solve 3/3, plain runs 1/3, with fewer
    // tokens on the conditioned side.
    CHECK(report["curves"]["bci"][0]["accuracy"] == 1.0);
    CHECK(report["curves"]["baseline"][0]["accuracy"] == doctest::Approx(1.0 / 3));
    REQUIRE(report.contains("token_savings"));
    CHECK(report["token_savings"][0]["matches_or_improves"] == true);
    CHECK(report["token_savings"][0]["savings_fraction"].get<double>() > 0.0);
    std::string csv_text = bhv_test::slurp(csv);
    CHECK(csv_text.find("budget,method,accuracy,pass@k,mean_tokens") == 0);
    CHECK(csv_text.find("64,baseline,") != std::string::npos);
    CHECK(csv_text.find("64,bci,") != std::string::npos);
}

TEST_CASE("topic retrieval works without an index") {
    TempDir dir("cli_topic");
    std::string hb = dir.file("handbook.jsonl").string();
    REQUIRE(cli({"curate", "--corpus", kCorpus, "--n-traces", "1", "--budget", "64",
                 "--out", hb, "--mock", kMock}) == 0);
    std::string log = dir.file("topic.jsonl").string();
    REQUIRE(cli({"infer", "--mode", "bci", "--corpus", kCorpus, "--handbook", hb,
                 "--retrieval", "topic", "--budget", "64", "--samples", "1", "--out",
                 log, "--mock", kMock}) == 0);
    auto traces = load_run_log(log);
    REQUIRE(traces.size() == 3);
    // Algebra questions see both Algebra behaviors.
    CHECK(traces[0].behavior_names ==
          std::vector<std::string>{"hint_for_alpha", "hint_for_gamma"});
}

TEST_CASE("self-improvement arms run end to end") {
    TempDir dir("cli_improve");
    std::string revise_log = dir.file("revise.jsonl").string();
    REQUIRE(cli({"infer", "--mode", "self-improve", "--variant", "revise", "--corpus",
                 kCorpus, "--budget", "64", "--samples", "1", "--r1-budget", "64",
                 "--out", revise_log, "--mock", kMock}) == 0);
    auto revise_traces = load_run_log(revise_log);
    REQUIRE(revise_traces.size() == 3);
    CHECK(revise_traces[0].role == TraceRole::revision);
    CHECK(revise_traces[0].extracted_answer == "5");  // revision keeps the slip

    std::string guided_log = dir.file("guided.jsonl").string();
    REQUIRE(cli({"infer", "--mode", "self-improve", "--variant", "behavior", "--corpus",
                 kCorpus, "--budget", "64", "--samples", "1", "--curation-budget", "64",
                 "--curation-traces", "2", "--out", guided_log, "--mock", kMock}) == 0);
    auto guided_traces = load_run_log(guided_log);
    REQUIRE(guided_traces.size() == 3);
    CHECK(guided_traces[0].extracted_answer == "4");  // hint fixes the answer
    CHECK(guided_traces[0].behavior_names ==
          std::vector<std::string>{"hint_for_alpha"});
}

TEST_CASE("build-sft exports both variants from one corpus") {
    TempDir dir("cli_sft");
    std::string hb = dir.file("handbook.jsonl").string();
    REQUIRE(cli({"curate", "--corpus", kCorpus, "--n-traces", "1", "--budget", "64",
                 "--out", hb, "--mock", kMock}) == 0);

    std::string bc = dir.file("bc.jsonl").string();
    std::string sft = dir.file("sft.jsonl").string();
    REQUIRE(cli({"build-sft", "--corpus", kCorpus, "--handbook", hb, "--variant", "bc",
                 "--out", bc, "--budget", "64", "--mock", kMock}) == 0);
    REQUIRE(cli({"build-sft", "--corpus", kCorpus, "--variant", "sft", "--out", sft,
                 "--budget", "64", "--mock", kMock}) == 0);

    DatasetValidation vbc = validate_dataset(bc);
    CHECK(vbc.bc_pairs == 3);
    CHECK(vbc.ok());
    DatasetValidation vsft = validate_dataset(sft);
    CHECK(vsft.sft_pairs == 3);
    CHECK(vsft.ok());

    Json report = Json::parse(bhv_test::slurp(bc + ".report.json"));
    CHECK(report["bc_pairs"] == 3);
    CHECK(report["accuracy_bc"] == 1.0);
}

TEST_CASE("report refuses logs with mismatched budgets") {
    TempDir dir("cli_mismatch");
    std::string base_log = dir.file("base.jsonl").string();
    std::string bci_log = dir.file("bci.jsonl").string();
    REQUIRE(cli({"infer", "--mode", "baseline", "--corpus", kCorpus, "--budget", "64",
                 "--samples", "1", "--out", base_log, "--mock", kMock}) == 0);
    REQUIRE(cli({"infer", "--mode", "baseline", "--corpus", kCorpus, "--budget", "32",
                 "--samples", "1", "--out", bci_log, "--mock", kMock}) == 0);
    int rc = cli({"report", "--baseline", base_log, "--bci", bci_log, "--corpus",
                  kCorpus, "--out-json", dir.file("r.json").string()});
    CHECK(rc == 2);
}

TEST_CASE("embedding-mode bci without an index exits 2") {
    TempDir dir("cli_noindex");
    std::string hb = dir.file("handbook.jsonl").string();
    REQUIRE(cli({"curate", "--corpus", kCorpus, "--n-traces", "1", "--budget", "64",
                 "--out", hb, "--mock", kMock}) == 0);
    int rc = cli({"infer", "--mode", "bci", "--corpus", kCorpus, "--handbook", hb,
                  "--budget", "64", "--out", dir.file("log.jsonl").string(), "--mock",
                  kMock});
    CHECK(rc == 2);
}

TEST_CASE("partial results exit 1: bc build with an uncurated question") {
    TempDir dir("cli_partial");
    std::string hb = dir.file("handbook.jsonl").string();
    REQUIRE(cli({"curate", "--corpus", kCorpus, "--n-traces", "1", "--budget", "64",
                 "--out", hb, "--mock", kMock}) == 0);
    // Extend the corpus with a question nothing was curated from.
    std::string corpus2 = dir.file("corpus2.jsonl").string();
    bhv_test::spit(corpus2, bhv_test::slurp(kCorpus) +
                                R"({"id":"qd","text":"delta problem: no behaviors yet",)"
                                R"("topic":null,"reference_answer":"1"})" "\n");
    int rc = cli({"build-sft", "--corpus", corpus2, "--handbook", hb, "--variant", "bc",
                  "--out", dir.file("bc.jsonl").string(), "--budget", "64", "--mock",
                  kMock});
    CHECK(rc == 1);
    DatasetValidation v = validate_dataset(dir.file("bc.jsonl"));
    CHECK(v.bc_pairs == 3);  // the three curated questions still export
}

TEST_CASE("shipped sft fixtures validate as expected") {
    DatasetValidation valid =
        validate_dataset(std::string(BHV_TEST_DATA_DIR) + "/sft_valid.jsonl");
    CHECK(valid.ok());
    CHECK(valid.bc_pairs == 2);
    CHECK(valid.sft_pairs == 1);

    DatasetValidation leaky =
        validate_dataset(std::string(BHV_TEST_DATA_DIR) + "/sft_leaky.jsonl");
    CHECK_FALSE(leaky.ok());
    REQUIRE(leaky.violations.size() == 1);
    CHECK(leaky.violations[0].first == 1);
}
