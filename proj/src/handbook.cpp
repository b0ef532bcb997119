#include "bhv/handbook.hpp"

#include "bhv/errors.hpp"
#include "bhv/jsonl.hpp"

namespace bhv {

namespace {

constexpr std::size_t kMaxNameLen = 128;

// Suffixed collision name: base__2, base__3, ... trimmed so the result
// still fits the name length limit.
std::string suffixed_name(const std::string& base, int n) {
    std::string suffix = "__" + std::to_string(n);
    std::string out = base;
    if (out.size() + suffix.size() > kMaxNameLen) {
        out.resize(kMaxNameLen - suffix.size());
    }
    return out + suffix;
}

}  // namespace

std::string behavior_validation_error(const Behavior& b) {
    if (b.name.empty()) return "empty name";
    if (b.name.size() > kMaxNameLen) return "name longer than 128 chars";
    if (b.name.find('\n') != std::string::npos || b.name.find('\r') != std::string::npos) {
        return "name contains newline";
    }
    if (b.instruction.empty()) return "empty instruction";
    return {};
}

std::string behavior_line(const Behavior& b) {
    return b.name + ": " + b.instruction;
}

AppendReport Handbook::append(const std::vector<Behavior>& candidates) {
    AppendReport report;
    for (const Behavior& cand : candidates) {
        std::string err = behavior_validation_error(cand);
        if (!err.empty()) {
            ++report.rejected;
            report.rejections.push_back(cand.name + ": " + err);
            continue;
        }
        // Walk the suffix family until we hit a duplicate or a free slot.
        std::string name = cand.name;
        int n = 1;
        bool stored = false;
        for (;;) {
            auto it = by_name_.find(name);
            if (it == by_name_.end()) {
                Behavior b = cand;
                b.name = name;
                by_name_.emplace(name, behaviors_.size());
                behaviors_.push_back(std::move(b));
                ++report.inserted;
                if (name != cand.name) ++report.renamed;
                stored = true;
                break;
            }
            if (behaviors_[it->second].instruction == cand.instruction) {
                ++report.deduplicated;
                break;
            }
            name = suffixed_name(cand.name, ++n);
        }
        (void)stored;
    }
    ++version_;
    return report;
}

std::vector<Behavior> Handbook::by_topic(const std::string& topic) const {
    std::vector<Behavior> out;
    for (const Behavior& b : behaviors_) {
        if (b.topic && *b.topic == topic) out.push_back(b);
    }
    return out;
}

std::vector<Behavior> Handbook::by_source_question(const std::string& question_id) const {
    std::vector<Behavior> out;
    for (const Behavior& b : behaviors_) {
        if (b.source_question_id == question_id) out.push_back(b);
    }
    return out;
}

const Behavior* Handbook::find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &behaviors_[it->second];
}

void Handbook::save(const std::filesystem::path& path) const {
    std::string out;
    Json header;
    header["format"] = "handbook";
    header["version"] = version_;
    out += to_jsonl_line(header);
    for (const Behavior& b : behaviors_) {
        Json j;
        j["name"] = b.name;
        j["instruction"] = b.instruction;
        j["topic"] = b.topic ? Json(*b.topic) : Json(nullptr);
        j["source_question_id"] = b.source_question_id;
        j["source_trace_id"] = b.source_trace_id;
        out += to_jsonl_line(j);
    }
    atomic_write_file(path, out);
}

Handbook Handbook::load(const std::filesystem::path& path) {
    Handbook hb;
    bool saw_header = false;
    for_each_jsonl_line(path, [&](int line_no, const Json& j) {
        auto fail = [&](const std::string& msg) {
            throw_parse(path.string() + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (!saw_header) {
            if (!j.is_object() || j.value("format", "") != "handbook" ||
                !j.contains("version") || !j["version"].is_number_unsigned()) {
                fail("expected handbook header line");
            }
            hb.version_ = j["version"].get<std::uint64_t>();
            saw_header = true;
            return;
        }
        if (!j.is_object() || !j.contains("name") || !j["name"].is_string() ||
            !j.contains("instruction") || !j["instruction"].is_string()) {
            fail("behavior line missing name/instruction");
        }
        Behavior b;
        b.name = j["name"].get<std::string>();
        b.instruction = j["instruction"].get<std::string>();
        if (j.contains("topic") && j["topic"].is_string()) {
            b.topic = j["topic"].get<std::string>();
        }
        b.source_question_id = j.value("source_question_id", "");
        b.source_trace_id = j.value("source_trace_id", "");
        std::string err = behavior_validation_error(b);
        if (!err.empty()) fail(err);
        if (hb.by_name_.count(b.name)) fail("duplicate behavior name: " + b.name);
        hb.by_name_.emplace(b.name, hb.behaviors_.size());
        hb.behaviors_.push_back(std::move(b));
    });
    if (!saw_header) {
        throw_parse(path.string() + ": missing handbook header line");
    }
    return hb;
}

}  // namespace bhv
