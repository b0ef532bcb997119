#pragma once

#include <string>
#include <vector>

#include "bhv/curation.hpp"
#include "bhv/handbook.hpp"
#include "bhv/index.hpp"
#include "bhv/prompts.hpp"
#include "bhv/provider.hpp"
#include "bhv/question.hpp"
#include "bhv/retrieval.hpp"
#include "bhv/run_config.hpp"
#include "bhv/trace.hpp"

namespace bhv {

// Conditioned prompt: every behavior as a "name: instruction" line in
// retrieval-rank order, then the question. With no behaviors this is
// exactly the plain prompt, so conditioning degrades gracefully.
std::string assemble_bci_prompt(const PromptSet& prompts,
                                const std::vector<Behavior>& behaviors, const Question& q);

std::string assemble_baseline_prompt(const PromptSet& prompts, const Question& q);

struct SampleFailure {
    int sample_index = 0;
    std::string message;
};

struct RunResult {
    std::vector<Trace> traces;          // in sample-index order
    std::vector<SampleFailure> failures;
};

// n_samples budget-capped generations conditioned on retrieved
// behaviors. Each trace records the behavior names present in its
// prompt. Per-sample failures are recorded; only all samples failing is
// an error.
RunResult run_bci(Provider& provider, const PromptSet& prompts, const Handbook& handbook,
                  const FlatIndex* index, const Question& q, const RunConfig& cfg,
                  int parallelism = 1);

RunResult run_baseline(Provider& provider, const PromptSet& prompts, const Question& q,
                       const RunConfig& cfg, int parallelism = 1);

// Self-improvement baseline: first attempt at cfg_r1.budget, then
// revisions of it at cfg_r2.budget. The revision prompt carries the
// question and the full first attempt.
struct CritiqueReviseResult {
    Trace first_attempt;
    RunResult revisions;
};

CritiqueReviseResult run_critique_revise(Provider& provider, const PromptSet& prompts,
                                         const Question& q, const RunConfig& cfg_r1,
                                         const RunConfig& cfg_r2, int parallelism = 1);

// Behavior-guided self-improvement: curate a per-question mini-handbook
// from n_curation_traces first attempts, then condition the revisions on
// exactly those behaviors (question-matched retrieval).
struct BehaviorGuidedResult {
    Handbook mini_handbook;
    RunResult revisions;
    std::vector<TraceFailure> curation_failures;
};

BehaviorGuidedResult run_behavior_guided_improvement(Provider& provider,
                                                     const PromptSet& prompts,
                                                     const Question& q,
                                                     const RunConfig& cfg_curate,
                                                     const RunConfig& cfg_r2,
                                                     int n_curation_traces = 16,
                                                     int parallelism = 1);

}  // namespace bhv
