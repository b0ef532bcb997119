#pragma once

#include <map>
#include <string>
#include <vector>

#include "bhv/inference.hpp"
#include "bhv/question.hpp"
#include "bhv/trace.hpp"

namespace bhv {

enum class Method { baseline, bci, critique_revise, behavior_guided };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct EvalRecord {
    std::string question_id;
    int budget = 0;
    int sample_index = 0;
    bool correct = false;
    int output_tokens = 0;
    Method method = Method::baseline;
};

struct CurvePoint {
    int budget = 0;
    double mean_accuracy = 0.0;     // mean over all (question, sample) runs
    double mean_output_tokens = 0.0;  // truncated runs count at full budget
    int n_questions = 0;
    int n_samples = 0;  // per-question runs when uniform, else total/questions
};

// Grades a run log against corpus reference answers. Every question in
// the log must have a reference. One record per trace line.
std::vector<EvalRecord> grade_run_log(const std::vector<Trace>& traces,
                                      const std::vector<Question>& corpus, Method method);

// Mean correctness and token usage over records sharing one budget and
// method. Empty input is an error.
CurvePoint accuracy(const std::vector<EvalRecord>& records);

// Set-method pass@k for one question: the first k*n_sets entries are cut
// into n_sets consecutive blocks of k; a block passes when any run in it
// is correct; returns the mean over blocks.
double pass_at_k_sets(const std::vector<bool>& correctness, int k, int n_sets);

// 1 - C(n-c, k)/C(n, k), evaluated as a product so large n stay exact to
// floating-point rounding.
double pass_at_k_unbiased(int n, int c, int k);

// Sample-order correctness vectors per question, suitable for the set
// method. Records must share one budget and method.
std::map<std::string, std::vector<bool>> correctness_by_question(
    const std::vector<EvalRecord>& records);

// Mean of pass_at_k_sets over questions.
double pass_at_k_over_questions(const std::vector<EvalRecord>& records, int k, int n_sets);

struct SweepReport {
    std::vector<CurvePoint> points;  // one per budget, ascending
    std::vector<std::string> failures;
};

// Runs `method` over the corpus at each budget and grades the traces.
// Handbook/index are required by the conditioned methods only.
SweepReport budget_sweep(Provider& provider, const PromptSet& prompts,
                         const std::vector<Question>& questions, Method method,
                         const std::vector<int>& budgets, const RunConfig& base_cfg,
                         const Handbook* handbook, const FlatIndex* index,
                         int parallelism = 1);

struct SavingsRow {
    int budget = 0;
    double tokens_a = 0.0;  // the method being credited with savings
    double tokens_b = 0.0;  // the reference method
    double savings_fraction = 0.0;  // (tokens_b - tokens_a) / tokens_b
    double accuracy_a = 0.0;
    double accuracy_b = 0.0;
    double accuracy_delta = 0.0;  // a - b
    bool matches_or_improves = false;  // accuracy_a >= accuracy_b
};

// Per-budget token deltas of curve a measured against curve b. The two
// curves must cover identical budgets.
std::vector<SavingsRow> token_savings(const std::vector<CurvePoint>& curve_a,
                                      const std::vector<CurvePoint>& curve_b);

}  // namespace bhv
