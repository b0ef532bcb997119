#include "bhv/inference.hpp"

#include "bhv/grading.hpp"
#include "bhv/util.hpp"

namespace bhv {

namespace {

std::string behaviors_block(const std::vector<Behavior>& behaviors) {
    std::string block;
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
        if (i) block += '\n';
        block += behavior_line(behaviors[i]);
    }
    return block;
}

// Fans out n_samples completions of one prompt, collecting traces in
// sample-index order regardless of completion order.
RunResult fan_out_samples(Provider& provider, const std::string& prompt,
                          const std::vector<std::string>& behavior_names,
                          const Question& q, const RunConfig& cfg, TraceRole role,
                          int parallelism) {
    std::vector<Trace> traces(static_cast<std::size_t>(cfg.n_samples));
    std::vector<std::string> errors(static_cast<std::size_t>(cfg.n_samples));

    parallel_for(static_cast<std::size_t>(cfg.n_samples), parallelism, [&](std::size_t i) {
        ChatRequest req;
        req.messages.push_back({"user", prompt});
        req.max_tokens = cfg.budget;
        req.temperature = cfg.temperature;
        req.top_p = cfg.top_p;
        req.model = cfg.model;
        req.seed = cfg.seed.value_or(0) + static_cast<std::int64_t>(i);
        try {
            ChatResponse resp = provider.complete(req);
            Trace t;
            t.id = q.id + "." + trace_role_name(role) + ".b" + std::to_string(cfg.budget) +
                   ".s" + std::to_string(i);
            t.question_id = q.id;
            t.text = resp.text;
            t.extracted_answer = extract_boxed_answer(resp.text);
            t.output_tokens = resp.output_tokens;
            t.budget = cfg.budget;
            t.truncated = resp.truncated;
            t.role = role;
            t.sample_index = static_cast<int>(i);
            t.behavior_names = behavior_names;
            traces[i] = std::move(t);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    RunResult result;
    for (int i = 0; i < cfg.n_samples; ++i) {
        if (errors[static_cast<std::size_t>(i)].empty()) {
            result.traces.push_back(std::move(traces[static_cast<std::size_t>(i)]));
        } else {
            result.failures.push_back({i, errors[static_cast<std::size_t>(i)]});
        }
    }
    if (result.traces.empty()) {
        throw_provider("all " + std::to_string(cfg.n_samples) + " samples failed for '" +
                       q.id + "': " + result.failures.front().message);
    }
    return result;
}

}  // namespace

std::string assemble_baseline_prompt(const PromptSet& prompts, const Question& q) {
    return render_prompt(prompts.baseline, {{"question", q.text}});
}

std::string assemble_bci_prompt(const PromptSet& prompts,
                                const std::vector<Behavior>& behaviors, const Question& q) {
    if (behaviors.empty()) return assemble_baseline_prompt(prompts, q);
    return render_prompt(prompts.bci,
                         {{"behaviors", behaviors_block(behaviors)}, {"question", q.text}});
}

RunResult run_bci(Provider& provider, const PromptSet& prompts, const Handbook& handbook,
                  const FlatIndex* index, const Question& q, const RunConfig& cfg,
                  int parallelism) {
    cfg.validate();
    std::vector<Behavior> behaviors = retrieve_for_question(
        handbook, index, &provider, q, cfg.retrieval_mode, cfg.k);
    std::vector<std::string> names;
    names.reserve(behaviors.size());
    for (const Behavior& b : behaviors) names.push_back(b.name);
    std::string prompt = assemble_bci_prompt(prompts, behaviors, q);
    return fan_out_samples(provider, prompt, names, q, cfg, TraceRole::bci, parallelism);
}

RunResult run_baseline(Provider& provider, const PromptSet& prompts, const Question& q,
                       const RunConfig& cfg, int parallelism) {
    cfg.validate();
    std::string prompt = assemble_baseline_prompt(prompts, q);
    return fan_out_samples(provider, prompt, {}, q, cfg, TraceRole::baseline, parallelism);
}

CritiqueReviseResult run_critique_revise(Provider& provider, const PromptSet& prompts,
                                         const Question& q, const RunConfig& cfg_r1,
                                         const RunConfig& cfg_r2, int parallelism) {
    cfg_r1.validate();
    cfg_r2.validate();

    // The first attempt is plain inference; its failure aborts the run.
    RunConfig first_cfg = cfg_r1;
    first_cfg.n_samples = 1;
    RunResult first = run_baseline(provider, prompts, q, first_cfg, 1);
    Trace first_attempt = std::move(first.traces.front());

    std::string prompt = render_prompt(
        prompts.revise, {{"question", q.text}, {"first_attempt", first_attempt.text}});
    RunResult revisions = fan_out_samples(provider, prompt, {}, q, cfg_r2,
                                          TraceRole::revision, parallelism);
    return {std::move(first_attempt), std::move(revisions)};
}

BehaviorGuidedResult run_behavior_guided_improvement(Provider& provider,
                                                     const PromptSet& prompts,
                                                     const Question& q,
                                                     const RunConfig& cfg_curate,
                                                     const RunConfig& cfg_r2,
                                                     int n_curation_traces,
                                                     int parallelism) {
    cfg_curate.validate();
    cfg_r2.validate();

    CurateQuestionResult curated =
        curate_question(provider, prompts, q, n_curation_traces, cfg_curate);

    BehaviorGuidedResult result;
    result.curation_failures = curated.failures;
    result.mini_handbook.append(curated.behaviors);

    // Question-matched retrieval: the revision sees exactly the behaviors
    // curated from this question's own attempts.
    std::vector<Behavior> behaviors = result.mini_handbook.by_source_question(q.id);
    std::vector<std::string> names;
    names.reserve(behaviors.size());
    for (const Behavior& b : behaviors) names.push_back(b.name);
    std::string prompt = assemble_bci_prompt(prompts, behaviors, q);
    result.revisions = fan_out_samples(provider, prompt, names, q, cfg_r2,
                                       TraceRole::revision, parallelism);
    return result;
}

}  // namespace bhv
