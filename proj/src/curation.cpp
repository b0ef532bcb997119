#include "bhv/curation.hpp"

#include <cctype>
#include <mutex>

#include "bhv/grading.hpp"
#include "bhv/jsonl.hpp"
#include "bhv/util.hpp"

namespace bhv {

namespace {

ChatRequest make_request(std::string prompt, const RunConfig& cfg,
                         std::int64_t seed_offset) {
    ChatRequest req;
    req.messages.push_back({"user", std::move(prompt)});
    req.max_tokens = cfg.budget;
    req.temperature = cfg.temperature;
    req.top_p = cfg.top_p;
    req.model = cfg.model;
    req.seed = cfg.seed.value_or(0) + seed_offset;
    return req;
}

std::string normalize_name(std::string_view raw) {
    std::string name = trim(raw);
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (c == ' ' || c == '\t') {
            out.push_back('_');
        } else {
            out.push_back(static_cast<char>(
                std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

// Strips "- ", "* ", "1. ", "2) " style prefixes.
std::string_view strip_bullet(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i < line.size() && (line[i] == '-' || line[i] == '*')) {
        ++i;
    } else {
        std::size_t d = i;
        while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
        if (d > i && d < line.size() && (line[d] == '.' || line[d] == ')')) i = d + 1;
    }
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    return line.substr(i);
}

bool try_parse_json_array(const std::string& raw,
                          std::vector<std::pair<std::string, std::string>>& out) {
    Json j = Json::parse(trim(raw), nullptr, false);
    if (j.is_discarded() || !j.is_array()) return false;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("name") || !item.contains("instruction")) {
            continue;
        }
        std::string name = normalize_name(item["name"].get<std::string>());
        std::string instruction = trim(item["instruction"].get<std::string>());
        if (name.empty() || instruction.empty()) continue;
        out.emplace_back(std::move(name), std::move(instruction));
    }
    return true;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_behavior_list(const std::string& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    if (try_parse_json_array(raw, out)) return out;

    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t end = raw.find('\n', start);
        std::string_view line(raw.data() + start,
                              (end == std::string::npos ? raw.size() : end) - start);
        start = (end == std::string::npos) ? raw.size() + 1 : end + 1;

        line = strip_bullet(line);
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string name = normalize_name(line.substr(0, colon));
        std::string instruction = trim(line.substr(colon + 1));
        if (name.empty() || instruction.empty()) continue;
        if (name.size() > 128) continue;
        // Identifier-shaped names only; a colon inside prose is not a
        // behavior entry.
        bool identifier = true;
        for (char c : name) {
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
                identifier = false;
                break;
            }
        }
        if (!identifier) continue;
        out.emplace_back(std::move(name), std::move(instruction));
    }
    return out;
}

Trace generate_solution(Provider& provider, const PromptSet& prompts, const Question& q,
                        const RunConfig& cfg, int trace_index) {
    cfg.validate();
    std::string prompt = render_prompt(prompts.solution, {{"question", q.text}});
    ChatResponse resp;
    try {
        resp = provider.complete(make_request(prompt, cfg, trace_index));
    } catch (const Error& e) {
        throw_provider("solution for question '" + q.id + "': " + e.what());
    }
    Trace t;
    t.id = q.id + ".t" + std::to_string(trace_index) + ".sol";
    t.question_id = q.id;
    t.text = resp.text;
    t.extracted_answer = extract_boxed_answer(resp.text);
    t.output_tokens = resp.output_tokens;
    t.budget = cfg.budget;
    t.truncated = resp.truncated;
    t.role = TraceRole::solution;
    t.sample_index = trace_index;
    return t;
}

Reflection generate_reflection(Provider& provider, const PromptSet& prompts,
                               const Question& q, const Trace& solution,
                               const RunConfig& cfg) {
    cfg.validate();
    if (solution.role != TraceRole::solution) {
        throw_invalid("generate_reflection expects a solution trace");
    }
    std::string prompt = render_prompt(
        prompts.reflection, {{"question", q.text}, {"solution", solution.text}});
    ChatResponse resp;
    try {
        resp = provider.complete(make_request(prompt, cfg, solution.sample_index));
    } catch (const Error& e) {
        throw_provider("reflection for question '" + q.id + "': " + e.what());
    }
    if (trim(resp.text).empty()) {
        throw_provider("empty reflection for question '" + q.id + "'");
    }
    return Reflection{solution.id, resp.text};
}

std::vector<Behavior> extract_behaviors(Provider& provider, const PromptSet& prompts,
                                        const Question& q, const Trace& solution,
                                        const Reflection& reflection, const RunConfig& cfg) {
    cfg.validate();
    if (solution.question_id != q.id || reflection.trace_id != solution.id) {
        throw_invalid("extract_behaviors inputs are not bound to the same question");
    }
    std::string prompt = render_prompt(prompts.behavior, {{"question", q.text},
                                                          {"solution", solution.text},
                                                          {"reflection", reflection.text}});
    ChatResponse resp;
    try {
        resp = provider.complete(make_request(prompt, cfg, solution.sample_index));
    } catch (const Error& e) {
        throw_provider("behavior extraction for question '" + q.id + "': " + e.what());
    }
    std::vector<Behavior> out;
    for (auto& [name, instruction] : parse_behavior_list(resp.text)) {
        Behavior b;
        b.name = std::move(name);
        b.instruction = std::move(instruction);
        b.topic = q.topic;
        b.source_question_id = q.id;
        b.source_trace_id = solution.id;
        out.push_back(std::move(b));
    }
    return out;
}

CurateQuestionResult curate_question(Provider& provider, const PromptSet& prompts,
                                     const Question& q, int n_traces, const RunConfig& cfg) {
    if (n_traces < 1) throw_invalid("n_traces must be >= 1");
    CurateQuestionResult result;
    for (int t = 0; t < n_traces; ++t) {
        std::string stage = "solution";
        try {
            Trace solution = generate_solution(provider, prompts, q, cfg, t);
            stage = "reflection";
            Reflection reflection = generate_reflection(provider, prompts, q, solution, cfg);
            stage = "behavior";
            std::vector<Behavior> behaviors =
                extract_behaviors(provider, prompts, q, solution, reflection, cfg);
            if (behaviors.empty()) ++result.traces_with_no_behaviors;
            for (Behavior& b : behaviors) result.behaviors.push_back(std::move(b));
            ++result.traces_succeeded;
        } catch (const Error& e) {
            result.failures.push_back({q.id, t, stage, e.what()});
        }
    }
    if (result.traces_succeeded == 0) {
        throw_provider("all " + std::to_string(n_traces) + " curation traces failed for '" +
                       q.id + "': " + result.failures.front().message);
    }
    return result;
}

std::string CurationReport::to_json() const {
    Json j;
    Json qs = Json::array();
    for (const QuestionCurationStats& s : questions) {
        Json q;
        q["question_id"] = s.question_id;
        q["traces_attempted"] = s.traces_attempted;
        q["traces_succeeded"] = s.traces_succeeded;
        q["behaviors_parsed"] = s.behaviors_parsed;
        q["inserted"] = s.inserted;
        q["renamed"] = s.renamed;
        q["deduplicated"] = s.deduplicated;
        q["rejected"] = s.rejected;
        q["failures"] = s.failures;
        qs.push_back(std::move(q));
    }
    j["questions"] = std::move(qs);
    j["total_behaviors_parsed"] = total_behaviors_parsed;
    j["total_inserted"] = total_inserted;
    j["total_failures"] = total_failures;
    return j.dump(2) + "\n";
}

void CurationReport::save(const std::filesystem::path& path) const {
    atomic_write_file(path, to_json());
}

CurationReport curate_corpus(Provider& provider, const PromptSet& prompts,
                             const std::vector<Question>& questions, int n_traces,
                             const RunConfig& cfg, Handbook& handbook, int parallelism) {
    struct Slot {
        CurateQuestionResult result;
        std::string fatal;
    };
    std::vector<Slot> slots(questions.size());

    parallel_for(questions.size(), parallelism, [&](std::size_t i) {
        try {
            slots[i].result = curate_question(provider, prompts, questions[i], n_traces, cfg);
        } catch (const std::exception& e) {
            slots[i].fatal = e.what();
        }
    });

    // Single writer: append in corpus order so the handbook is
    // reproducible no matter how the curation work was scheduled.
    CurationReport report;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        QuestionCurationStats stats;
        stats.question_id = questions[i].id;
        stats.traces_attempted = n_traces;
        if (!slots[i].fatal.empty()) {
            stats.failures.push_back(slots[i].fatal);
            ++report.total_failures;
            report.questions.push_back(std::move(stats));
            continue;
        }
        const CurateQuestionResult& r = slots[i].result;
        stats.traces_succeeded = r.traces_succeeded;
        stats.behaviors_parsed = static_cast<int>(r.behaviors.size());
        for (const TraceFailure& f : r.failures) {
            stats.failures.push_back("trace " + std::to_string(f.trace_index) + " " +
                                     f.stage + ": " + f.message);
        }
        AppendReport ar = handbook.append(r.behaviors);
        stats.inserted = ar.inserted;
        stats.renamed = ar.renamed;
        stats.deduplicated = ar.deduplicated;
        stats.rejected = ar.rejected;
        report.total_behaviors_parsed += stats.behaviors_parsed;
        report.total_inserted += ar.inserted;
        report.total_failures += static_cast<int>(r.failures.size());
        report.questions.push_back(std::move(stats));
    }
    return report;
}

}  // namespace bhv
