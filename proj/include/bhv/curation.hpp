#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bhv/handbook.hpp"
#include "bhv/prompts.hpp"
#include "bhv/provider.hpp"
#include "bhv/question.hpp"
#include "bhv/run_config.hpp"
#include "bhv/trace.hpp"

namespace bhv {

// Three-stage curation pipeline: solve, reflect, extract behaviors.
// Traces are kept regardless of correctness; a truncated solution still
// proceeds to reflection.

Trace generate_solution(Provider& provider, const PromptSet& prompts, const Question& q,
                        const RunConfig& cfg, int trace_index = 0);

Reflection generate_reflection(Provider& provider, const PromptSet& prompts,
                               const Question& q, const Trace& solution,
                               const RunConfig& cfg);

std::vector<Behavior> extract_behaviors(Provider& provider, const PromptSet& prompts,
                                        const Question& q, const Trace& solution,
                                        const Reflection& reflection, const RunConfig& cfg);

// Parses the model's behavior-list output. Accepted per line:
//   name: instruction
// with optional leading "-", "*", or "N." / "N)" numbering. If the whole
// text parses as a JSON array of {name, instruction} objects, that is
// used instead. Names are normalized (lowercased, spaces -> underscores);
// lines without a usable name/instruction are skipped, never an error.
std::vector<std::pair<std::string, std::string>> parse_behavior_list(const std::string& raw);

struct TraceFailure {
    std::string question_id;
    int trace_index = 0;
    std::string stage;  // solution | reflection | behavior
    std::string message;
};

struct CurateQuestionResult {
    std::vector<Behavior> behaviors;
    std::vector<TraceFailure> failures;
    int traces_succeeded = 0;
    int traces_with_no_behaviors = 0;
};

// Runs the pipeline n_traces times. Per-trace failures are recorded and
// the remaining traces continue; only all traces failing is an error.
CurateQuestionResult curate_question(Provider& provider, const PromptSet& prompts,
                                     const Question& q, int n_traces, const RunConfig& cfg);

struct QuestionCurationStats {
    std::string question_id;
    int traces_attempted = 0;
    int traces_succeeded = 0;
    int behaviors_parsed = 0;
    int inserted = 0;
    int renamed = 0;
    int deduplicated = 0;
    int rejected = 0;
    std::vector<std::string> failures;
};

struct CurationReport {
    std::vector<QuestionCurationStats> questions;
    int total_behaviors_parsed = 0;
    int total_inserted = 0;
    int total_failures = 0;

    std::string to_json() const;
    void save(const std::filesystem::path& path) const;
};

// Curates every question (concurrently up to `parallelism`) and appends
// into the handbook through a single writer, in corpus order.
CurationReport curate_corpus(Provider& provider, const PromptSet& prompts,
                             const std::vector<Question>& questions, int n_traces,
                             const RunConfig& cfg, Handbook& handbook, int parallelism = 4);

}  // namespace bhv
