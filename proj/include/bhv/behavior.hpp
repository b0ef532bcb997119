#pragma once

#include <optional>
#include <string>

namespace bhv {

// One unit of procedural memory: a named, reusable reasoning instruction
// plus the provenance of the trace it was distilled from.
struct Behavior {
    std::string name;         // snake_case identifier, unique per handbook
    std::string instruction;  // free text
    std::optional<std::string> topic;
    std::string source_question_id;
    std::string source_trace_id;

    bool operator==(const Behavior&) const = default;
};

// Empty string when valid, otherwise the reason the entry is unusable.
std::string behavior_validation_error(const Behavior& b);

// "name: instruction" — the canonical one-line rendering used in prompts
// and as embedding input.
std::string behavior_line(const Behavior& b);

}  // namespace bhv
