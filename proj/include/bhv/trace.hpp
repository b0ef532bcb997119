#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bhv {

enum class TraceRole { solution, reflection, revision, bci, baseline };

const char* trace_role_name(TraceRole role);
TraceRole trace_role_from_name(const std::string& name);

// One complete model generation with its token accounting.
struct Trace {
    std::string id;
    std::string question_id;
    std::string text;
    std::optional<std::string> extracted_answer;
    int output_tokens = 0;
    int budget = 0;
    bool truncated = false;
    TraceRole role = TraceRole::solution;
    int sample_index = 0;
    // Names of the behaviors that were present in this trace's prompt,
    // in prompt order; empty for unconditioned runs.
    std::vector<std::string> behavior_names;
};

struct Reflection {
    std::string trace_id;
    std::string text;
};

// Run log: JSONL, one trace per line.
std::string run_log_line(const Trace& t);
void append_run_log(std::string& log, const Trace& t);
void save_run_log(const std::vector<Trace>& traces, const std::filesystem::path& path);
std::vector<Trace> load_run_log(const std::filesystem::path& path);

}  // namespace bhv
