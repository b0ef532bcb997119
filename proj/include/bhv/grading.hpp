#pragma once

#include <optional>
#include <string>

#include "bhv/trace.hpp"

namespace bhv {

// Content of the last balanced \boxed{...} group; nullopt when none.
// Nested braces stay intact: \boxed{\frac{a}{b}} yields "\frac{a}{b}".
std::optional<std::string> extract_boxed_answer(const std::string& text);

// Canonical answer form: trim, collapse internal whitespace, drop
// \left / \right, "$" and one trailing ".", and strip leading zeros off
// plain integers ("007" -> "7"). Exact string match after this is the
// grading rule; no symbolic equivalence is attempted.
std::string normalize_answer(const std::string& raw);

// True iff the trace's boxed answer normalizes to the reference. A trace
// without a boxed answer is always wrong (truncated runs grade as
// incorrect). An empty reference is an error.
bool grade(const Trace& trace, const std::string& reference);
bool grade_text(const std::string& trace_text, const std::string& reference);

}  // namespace bhv
