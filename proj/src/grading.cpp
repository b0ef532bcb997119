#include "bhv/grading.hpp"

#include <cctype>

#include "bhv/errors.hpp"
#include "bhv/util.hpp"

namespace bhv {

namespace {

// Scans the group starting right after "\boxed{"'s opening brace.
// Returns the content when braces balance, nullopt otherwise. "\{" and
// "\}" are literal braces and do not affect nesting.
std::optional<std::string> read_balanced_group(const std::string& text, std::size_t open) {
    int depth = 1;
    for (std::size_t i = open + 1; i < text.size(); ++i) {
        char c = text[i];
        if (c == '\\' && i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '}')) {
            ++i;
            continue;
        }
        if (c == '{') ++depth;
        if (c == '}') {
            --depth;
            if (depth == 0) return text.substr(open + 1, i - open - 1);
        }
    }
    return std::nullopt;
}

std::string erase_all(std::string s, const std::string& token) {
    std::size_t pos;
    while ((pos = s.find(token)) != std::string::npos) s.erase(pos, token.size());
    return s;
}

bool is_plain_integer(const std::string& s) {
    std::size_t i = (s.size() > 1 && s[0] == '-') ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::string canonical_integer(const std::string& s) {
    bool negative = s[0] == '-';
    std::size_t i = negative ? 1 : 0;
    while (i + 1 < s.size() && s[i] == '0') ++i;
    std::string digits = s.substr(i);
    if (digits == "0") return "0";
    return negative ? "-" + digits : digits;
}

}  // namespace

std::optional<std::string> extract_boxed_answer(const std::string& text) {
    static const std::string kMarker = "\\boxed{";
    std::optional<std::string> last;
    std::size_t pos = 0;
    while ((pos = text.find(kMarker, pos)) != std::string::npos) {
        std::size_t open = pos + kMarker.size() - 1;
        if (auto group = read_balanced_group(text, open)) last = std::move(group);
        pos += kMarker.size();
    }
    return last;
}

std::string normalize_answer(const std::string& raw) {
    std::string s = erase_all(raw, "$");
    s = erase_all(std::move(s), "\\left");
    s = erase_all(std::move(s), "\\right");
    s = collapse_spaces(s);
    if (!s.empty() && s.back() == '.') s.pop_back();
    s = trim(s);
    if (is_plain_integer(s)) s = canonical_integer(s);
    return s;
}

bool grade_text(const std::string& trace_text, const std::string& reference) {
    if (reference.empty()) throw_invalid("grade: missing reference answer");
    std::optional<std::string> extracted = extract_boxed_answer(trace_text);
    if (!extracted) return false;
    return normalize_answer(*extracted) == normalize_answer(reference);
}

bool grade(const Trace& trace, const std::string& reference) {
    return grade_text(trace.text, reference);
}

}  // namespace bhv
