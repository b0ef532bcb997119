#include <doctest.h>

#include <random>
#include <set>

#include "bhv/handbook.hpp"
#include "bhv/jsonl.hpp"
#include "test_support.hpp"

using namespace bhv;
using bhv_test::TempDir;

namespace {

Behavior make(const std::string& name, const std::string& instruction,
              const std::string& topic = "") {
    Behavior b;
    b.name = name;
    b.instruction = instruction;
    if (!topic.empty()) b.topic = topic;
    b.source_question_id = "q0";
    b.source_trace_id = "q0.t0.sol";
    return b;
}

}  // namespace

TEST_CASE("append to empty handbook") {
    Handbook hb;
    AppendReport r = hb.append({make("a", "do a"), make("b", "do b")});
    CHECK(r.inserted == 2);
    CHECK(hb.size() == 2);
    CHECK(hb.version() == 1);
    CHECK(hb.behaviors()[0].name == "a");
    CHECK(hb.behaviors()[1].name == "b");
}

TEST_CASE("identical duplicate is deduplicated") {
    Handbook hb;
    hb.append({make("a", "do a")});
    AppendReport r = hb.append({make("a", "do a")});
    CHECK(r.inserted == 0);
    CHECK(r.deduplicated == 1);
    CHECK(hb.size() == 1);
    CHECK(hb.version() == 2);
}

TEST_CASE("same name with different instruction gets a suffix") {
    Handbook hb;
    hb.append({make("a", "first")});
    AppendReport r = hb.append({make("a", "second")});
    CHECK(r.inserted == 1);
    CHECK(r.renamed == 1);
    REQUIRE(hb.size() == 2);
    CHECK(hb.behaviors()[1].name == "a__2");
    CHECK(hb.behaviors()[1].instruction == "second");

    // Re-appending the renamed instruction is idempotent.
    AppendReport again = hb.append({make("a", "second")});
    CHECK(again.inserted == 0);
    CHECK(again.deduplicated == 1);

    AppendReport third = hb.append({make("a", "third")});
    CHECK(hb.behaviors()[2].name == "a__3");
    CHECK(third.renamed == 1);
}

TEST_CASE("invalid candidates are rejected, batch continues") {
    Handbook hb;
    AppendReport r = hb.append({make("", "x"), make("ok", ""), make("good", "fine")});
    CHECK(r.rejected == 2);
    CHECK(r.inserted == 1);
    REQUIRE(r.rejections.size() == 2);
    CHECK(r.rejections[0].find("empty name") != std::string::npos);
    CHECK(r.rejections[1].find("empty instruction") != std::string::npos);
    CHECK(hb.size() == 1);
}

TEST_CASE("example behavior is stored verbatim and retrievable") {
    Handbook hb;
    std::string instruction =
        "Systematically count possibilities by examining each digit's contribution "
        "without overlap; this prevents missed cases and double-counts.";
    hb.append({make("systematic_counting", instruction)});
    const Behavior* b = hb.find("systematic_counting");
    REQUIRE(b != nullptr);
    CHECK(b->instruction == instruction);
}

TEST_CASE("by_topic filters exactly and preserves order") {
    Handbook hb;
    hb.append({make("a1", "x", "Algebra"), make("g1", "y", "Geometry"),
               make("a2", "z", "Algebra")});
    auto algebra = hb.by_topic("Algebra");
    REQUIRE(algebra.size() == 2);
    CHECK(algebra[0].name == "a1");
    CHECK(algebra[1].name == "a2");
    CHECK(hb.by_topic("Geometry").size() == 1);
    CHECK(hb.by_topic("Number Theory").empty());
}

TEST_CASE("topic fixture with per-subject counts") {
    const std::vector<std::pair<std::string, int>> counts = {
        {"Algebra", 113},
        {"Prealgebra", 144},
        {"Counting", 128},
        {"Intermediate Algebra", 107},
        {"Geometry", 95},
        {"Number Theory", 107},
        {"Precalculus", 91}};
    Handbook hb;
    std::vector<Behavior> batch;
    for (const auto& [topic, n] : counts) {
        for (int i = 0; i < n; ++i) {
            batch.push_back(make(topic.substr(0, 3) + "_" + std::to_string(i),
                                 "instruction " + std::to_string(i), topic));
        }
    }
    hb.append(batch);
    CHECK(hb.by_topic("Prealgebra").size() == 144);
    CHECK(hb.by_topic("Geometry").size() == 95);
}

TEST_CASE("save/load roundtrip is exact") {
    TempDir dir("handbook");
    Handbook hb;
    hb.append({make("a", "do a", "Algebra"), make("b", "do b")});
    hb.append({make("c", "unicode: \xE2\x88\x9A" "2 \xC3\xA9 \xF0\x9F\x99\x82")});
    hb.save(dir.file("h.jsonl"));
    Handbook loaded = Handbook::load(dir.file("h.jsonl"));
    CHECK(loaded == hb);
    CHECK(loaded.version() == hb.version());
    CHECK(loaded.behaviors()[0].topic == hb.behaviors()[0].topic);
}

TEST_CASE("load rejects duplicate names, naming the duplicate") {
    TempDir dir("handbook_dup");
    std::string content =
        "{\"format\":\"handbook\",\"version\":1}\n"
        "{\"name\":\"a\",\"instruction\":\"x\"}\n"
        "{\"name\":\"a\",\"instruction\":\"y\"}\n";
    bhv_test::spit(dir.file("dup.jsonl"), content);
    try {
        Handbook::load(dir.file("dup.jsonl"));
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("duplicate behavior name: a") != std::string::npos);
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("load reports malformed line numbers") {
    TempDir dir("handbook_bad");
    bhv_test::spit(dir.file("bad.jsonl"),
                   "{\"format\":\"handbook\",\"version\":0}\nnot json at all\n");
    try {
        Handbook::load(dir.file("bad.jsonl"));
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
}

TEST_CASE("large handbook fixture loads at full size") {
    TempDir dir("handbook_1457");
    Handbook hb;
    std::vector<Behavior> batch;
    for (int i = 0; i < 1457; ++i) {
        batch.push_back(make("behavior_" + std::to_string(i),
                             "instruction " + std::to_string(i)));
    }
    hb.append(batch);
    hb.save(dir.file("big.jsonl"));
    Handbook loaded = Handbook::load(dir.file("big.jsonl"));
    CHECK(loaded.size() == 1457);
}

TEST_CASE("randomized collision batches keep invariants") {
    std::mt19937 rng(20250811);
    Handbook hb;
    std::vector<Behavior> shadow;

    for (int batch_no = 0; batch_no < 200; ++batch_no) {
        std::vector<Behavior> batch;
        int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) {
            // Small name/instruction pools to force every collision kind.
            batch.push_back(make("name_" + std::to_string(rng() % 10),
                                 "inst_" + std::to_string(rng() % 4)));
        }
        std::uint64_t version_before = hb.version();
        std::size_t size_before = hb.size();
        hb.append(batch);
        CHECK(hb.version() == version_before + 1);
        REQUIRE(hb.size() >= size_before);
        for (std::size_t i = 0; i < shadow.size(); ++i) {
            REQUIRE(hb.behaviors()[i] == shadow[i]);  // append-only
        }
        shadow = hb.behaviors();
    }
    std::set<std::string> names;
    for (const Behavior& b : hb.behaviors()) {
        REQUIRE(names.insert(b.name).second);  // uniqueness
    }
}

TEST_CASE("persistence roundtrip fuzz with unicode instructions") {
    std::mt19937 rng(7);
    const std::vector<std::string> glyphs = {
        "a", "Z", "0", " ", "_", "\xC3\xA9", "\xE2\x88\x91", "\xF0\x9F\x99\x82",
        "\"", "\\", "\t"};
    TempDir dir("fuzz");
    for (int round = 0; round < 20; ++round) {
        Handbook hb;
        std::vector<Behavior> batch;
        int n = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            std::string instruction;
            int len = 1 + static_cast<int>(rng() % 24);
            for (int j = 0; j < len; ++j) instruction += glyphs[rng() % glyphs.size()];
            batch.push_back(make("b" + std::to_string(i), instruction,
                                 (rng() % 2) ? "Topic" : ""));
        }
        hb.append(batch);
        hb.save(dir.file("h.jsonl"));
        Handbook loaded = Handbook::load(dir.file("h.jsonl"));
        REQUIRE(loaded == hb);
    }
}
