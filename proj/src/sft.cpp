#include "bhv/sft.hpp"

#include <unordered_map>

#include "bhv/errors.hpp"
#include "bhv/grading.hpp"
#include "bhv/inference.hpp"
#include "bhv/jsonl.hpp"
#include "bhv/util.hpp"

namespace bhv {

namespace {

// A response leaks the prompt's behavior block when it contains a line
// that re-states one of the teacher's behaviors as "name: ..."
// (optionally bulleted). Citing a behavior name inline in prose is fine.
bool line_restates_behavior(std::string_view line,
                            const std::vector<std::string>& names) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i < line.size() && (line[i] == '-' || line[i] == '*')) ++i;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::string_view rest = line.substr(i);
    for (const std::string& name : names) {
        if (!starts_with(rest, name)) continue;
        std::size_t after = name.size();
        while (after < rest.size() && (rest[after] == ' ' || rest[after] == '\t')) ++after;
        if (after < rest.size() && rest[after] == ':') return true;
    }
    return false;
}

bool response_leaks_behaviors(const std::string& response,
                              const std::vector<std::string>& names) {
    if (names.empty()) return false;
    std::size_t start = 0;
    while (start <= response.size()) {
        std::size_t end = response.find('\n', start);
        std::string_view line(response.data() + start,
                              (end == std::string::npos ? response.size() : end) - start);
        if (line_restates_behavior(line, names)) return true;
        start = (end == std::string::npos) ? response.size() + 1 : end + 1;
    }
    return false;
}

SftBuildResult build_dataset(Provider& provider, const PromptSet& prompts,
                             const std::vector<Question>& questions,
                             const Handbook* handbook, const RunConfig& cfg,
                             SftVariant variant, int parallelism) {
    RunConfig teacher_cfg = cfg;
    teacher_cfg.n_samples = 1;  // a single teacher response per question
    teacher_cfg.validate();

    struct Slot {
        SftPair pair;
        bool skipped = false;
        std::string error;
    };
    std::vector<Slot> slots(questions.size());

    parallel_for(questions.size(), parallelism, [&](std::size_t i) {
        const Question& q = questions[i];
        try {
            std::vector<Behavior> behaviors;
            if (variant == SftVariant::BC) {
                behaviors = handbook->by_source_question(q.id);
                if (behaviors.empty()) {
                    slots[i].skipped = true;
                    return;
                }
            }
            std::string prompt = variant == SftVariant::BC
                                     ? assemble_bci_prompt(prompts, behaviors, q)
                                     : assemble_baseline_prompt(prompts, q);
            ChatRequest req;
            req.messages.push_back({"user", std::move(prompt)});
            req.max_tokens = teacher_cfg.budget;
            req.temperature = teacher_cfg.temperature;
            req.top_p = teacher_cfg.top_p;
            req.model = teacher_cfg.model;
            req.seed = teacher_cfg.seed.value_or(0);
            ChatResponse resp = provider.complete(req);

            SftPair pair;
            pair.question_id = q.id;
            pair.question_text = q.text;
            pair.response_text = resp.text;
            pair.variant = variant;
            for (const Behavior& b : behaviors) {
                pair.teacher_behavior_names.push_back(b.name);
            }
            slots[i].pair = std::move(pair);
        } catch (const std::exception& e) {
            slots[i].error = e.what();
        }
    });

    SftBuildResult result;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (slots[i].skipped) {
            result.report.skipped.push_back(questions[i].id);
        } else if (!slots[i].error.empty()) {
            result.report.failures.push_back(questions[i].id + ": " + slots[i].error);
        } else {
            result.pairs.push_back(std::move(slots[i].pair));
            ++result.report.built;
        }
    }
    return result;
}

}  // namespace

const char* sft_variant_name(SftVariant v) {
    return v == SftVariant::BC ? "BC" : "SFT";
}

SftVariant sft_variant_from_name(const std::string& name) {
    if (name == "BC" || name == "bc") return SftVariant::BC;
    if (name == "SFT" || name == "sft") return SftVariant::SFT;
    throw_invalid("unknown dataset variant: " + name);
}

SftBuildResult build_bc_dataset(Provider& provider, const PromptSet& prompts,
                                const std::vector<Question>& questions,
                                const Handbook& handbook, const RunConfig& cfg,
                                int parallelism) {
    return build_dataset(provider, prompts, questions, &handbook, cfg, SftVariant::BC,
                         parallelism);
}

SftBuildResult build_sft_dataset(Provider& provider, const PromptSet& prompts,
                                 const std::vector<Question>& questions,
                                 const RunConfig& cfg, int parallelism) {
    return build_dataset(provider, prompts, questions, nullptr, cfg, SftVariant::SFT,
                         parallelism);
}

void export_dataset(const std::vector<SftPair>& pairs, const std::filesystem::path& path) {
    std::string out;
    for (const SftPair& p : pairs) {
        if (p.variant == SftVariant::SFT && !p.teacher_behavior_names.empty()) {
            throw_invalid("SFT pair '" + p.question_id + "' carries behavior names");
        }
        if (response_leaks_behaviors(p.response_text, p.teacher_behavior_names)) {
            throw_invalid("BC pair '" + p.question_id +
                          "' embeds its behavior block in the response");
        }
        Json j;
        j["prompt"] = p.question_text;
        j["completion"] = p.response_text;
        Json meta;
        meta["question_id"] = p.question_id;
        meta["variant"] = sft_variant_name(p.variant);
        meta["teacher_behavior_names"] = p.teacher_behavior_names;
        j["meta"] = std::move(meta);
        out += to_jsonl_line(j);
    }
    atomic_write_file(path, out);
}

std::string DatasetValidation::to_json() const {
    Json j;
    j["total"] = total;
    j["bc_pairs"] = bc_pairs;
    j["sft_pairs"] = sft_pairs;
    Json viols = Json::array();
    for (const auto& [line, reason] : violations) {
        viols.push_back({{"line", line}, {"reason", reason}});
    }
    j["violations"] = std::move(viols);
    j["accuracy_bc"] = accuracy_bc ? Json(*accuracy_bc) : Json(nullptr);
    j["accuracy_sft"] = accuracy_sft ? Json(*accuracy_sft) : Json(nullptr);
    return j.dump(2) + "\n";
}

DatasetValidation validate_dataset(const std::filesystem::path& path,
                                   const std::vector<Question>* corpus) {
    std::unordered_map<std::string, const Question*> by_id;
    if (corpus) {
        for (const Question& q : *corpus) by_id.emplace(q.id, &q);
    }

    DatasetValidation v;
    int graded_bc = 0, correct_bc = 0, graded_sft = 0, correct_sft = 0;
    for_each_jsonl_line(path, [&](int line_no, const Json& j) {
        ++v.total;
        if (!j.is_object() || !j.contains("prompt") || !j.contains("completion") ||
            !j.contains("meta")) {
            v.violations.emplace_back(line_no, "missing prompt/completion/meta");
            return;
        }
        const Json& meta = j["meta"];
        std::string variant = meta.value("variant", "");
        std::vector<std::string> names;
        if (meta.contains("teacher_behavior_names")) {
            for (const auto& n : meta["teacher_behavior_names"]) {
                names.push_back(n.get<std::string>());
            }
        }
        std::string completion = j["completion"].get<std::string>();
        if (variant == "BC") {
            ++v.bc_pairs;
            if (response_leaks_behaviors(completion, names)) {
                v.violations.emplace_back(
                    line_no, "BC response embeds the prompt's behavior-list block");
            }
        } else if (variant == "SFT") {
            ++v.sft_pairs;
            if (!names.empty()) {
                v.violations.emplace_back(line_no, "SFT pair carries behavior names");
            }
        } else {
            v.violations.emplace_back(line_no, "unknown variant: " + variant);
            return;
        }
        if (corpus) {
            auto it = by_id.find(meta.value("question_id", ""));
            if (it != by_id.end() && it->second->reference_answer) {
                bool correct = grade_text(completion, *it->second->reference_answer);
                if (variant == "BC") {
                    ++graded_bc;
                    correct_bc += correct ? 1 : 0;
                } else {
                    ++graded_sft;
                    correct_sft += correct ? 1 : 0;
                }
            }
        }
    });
    if (graded_bc > 0) v.accuracy_bc = static_cast<double>(correct_bc) / graded_bc;
    if (graded_sft > 0) v.accuracy_sft = static_cast<double>(correct_sft) / graded_sft;
    return v;
}

}  // namespace bhv
