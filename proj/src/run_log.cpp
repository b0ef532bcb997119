#include "bhv/trace.hpp"

#include "bhv/errors.hpp"
#include "bhv/jsonl.hpp"

namespace bhv {

const char* trace_role_name(TraceRole role) {
    switch (role) {
        case TraceRole::solution: return "solution";
        case TraceRole::reflection: return "reflection";
        case TraceRole::revision: return "revision";
        case TraceRole::bci: return "bci";
        case TraceRole::baseline: return "baseline";
    }
    return "solution";
}

TraceRole trace_role_from_name(const std::string& name) {
    if (name == "solution") return TraceRole::solution;
    if (name == "reflection") return TraceRole::reflection;
    if (name == "revision") return TraceRole::revision;
    if (name == "bci") return TraceRole::bci;
    if (name == "baseline") return TraceRole::baseline;
    throw_parse("unknown trace role: " + name);
}

std::string run_log_line(const Trace& t) {
    Json j;
    j["id"] = t.id;
    j["question_id"] = t.question_id;
    j["role"] = trace_role_name(t.role);
    j["sample_index"] = t.sample_index;
    j["budget"] = t.budget;
    j["output_tokens"] = t.output_tokens;
    j["truncated"] = t.truncated;
    j["behavior_names"] = t.behavior_names;
    j["text"] = t.text;
    j["extracted_answer"] = t.extracted_answer ? Json(*t.extracted_answer) : Json(nullptr);
    return to_jsonl_line(j);
}

void append_run_log(std::string& log, const Trace& t) {
    log += run_log_line(t);
}

void save_run_log(const std::vector<Trace>& traces, const std::filesystem::path& path) {
    std::string out;
    for (const Trace& t : traces) append_run_log(out, t);
    atomic_write_file(path, out);
}

std::vector<Trace> load_run_log(const std::filesystem::path& path) {
    std::vector<Trace> out;
    for_each_jsonl_line(path, [&](int line_no, const Json& j) {
        auto fail = [&](const std::string& msg) {
            throw_parse(path.string() + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (!j.is_object() || !j.contains("question_id") || !j.contains("role")) {
            fail("trace line needs question_id and role");
        }
        Trace t;
        t.id = j.value("id", "");
        t.question_id = j["question_id"].get<std::string>();
        t.role = trace_role_from_name(j["role"].get<std::string>());
        t.sample_index = j.value("sample_index", 0);
        t.budget = j.value("budget", 0);
        t.output_tokens = j.value("output_tokens", 0);
        t.truncated = j.value("truncated", false);
        if (j.contains("behavior_names") && j["behavior_names"].is_array()) {
            for (const auto& n : j["behavior_names"]) {
                t.behavior_names.push_back(n.get<std::string>());
            }
        }
        t.text = j.value("text", "");
        if (j.contains("extracted_answer") && j["extracted_answer"].is_string()) {
            t.extracted_answer = j["extracted_answer"].get<std::string>();
        }
        out.push_back(std::move(t));
    });
    return out;
}

}  // namespace bhv
