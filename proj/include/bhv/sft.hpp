#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bhv/handbook.hpp"
#include "bhv/prompts.hpp"
#include "bhv/provider.hpp"
#include "bhv/question.hpp"
#include "bhv/run_config.hpp"

namespace bhv {

enum class SftVariant { BC, SFT };

const char* sft_variant_name(SftVariant v);
SftVariant sft_variant_from_name(const std::string& name);

// One training pair. For the BC variant the response came from a
// behavior-conditioned teacher run, but the behaviors stay in metadata:
// they are never part of the training input or the response text.
struct SftPair {
    std::string question_id;
    std::string question_text;
    std::string response_text;
    SftVariant variant = SftVariant::SFT;
    std::vector<std::string> teacher_behavior_names;  // empty for SFT
};

struct SftBuildReport {
    int built = 0;
    std::vector<std::string> skipped;   // question ids with no curated behaviors
    std::vector<std::string> failures;  // provider errors, per question
};

struct SftBuildResult {
    std::vector<SftPair> pairs;
    SftBuildReport report;
};

// One behavior-conditioned teacher response per question, conditioned on
// the behaviors curated from that same question (question-matched
// retrieval). Questions without curated behaviors are skipped.
SftBuildResult build_bc_dataset(Provider& provider, const PromptSet& prompts,
                                const std::vector<Question>& questions,
                                const Handbook& handbook, const RunConfig& cfg,
                                int parallelism = 1);

// One plain teacher response per question.
SftBuildResult build_sft_dataset(Provider& provider, const PromptSet& prompts,
                                 const std::vector<Question>& questions,
                                 const RunConfig& cfg, int parallelism = 1);

// JSONL: {"prompt": question, "completion": response, "meta": {...}}.
void export_dataset(const std::vector<SftPair>& pairs, const std::filesystem::path& path);

struct DatasetValidation {
    int total = 0;
    int bc_pairs = 0;
    int sft_pairs = 0;
    std::vector<std::pair<int, std::string>> violations;  // (line, reason)
    std::optional<double> accuracy_bc;   // set when the corpus has references
    std::optional<double> accuracy_sft;

    bool ok() const { return violations.empty(); }
    std::string to_json() const;
};

// Re-checks the exported invariants: parseable lines, variant counts,
// and — the critical one — no BC response may embed its prompt's
// behavior-list block. With a corpus, responses are also graded against
// reference answers to report per-variant dataset accuracy.
DatasetValidation validate_dataset(const std::filesystem::path& path,
                                   const std::vector<Question>* corpus = nullptr);

}  // namespace bhv
