#include "bhv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>
#include <unordered_map>

#include "bhv/errors.hpp"
#include "bhv/grading.hpp"

namespace bhv {

const char* method_name(Method m) {
    switch (m) {
        case Method::baseline: return "baseline";
        case Method::bci: return "bci";
        case Method::critique_revise: return "critique_revise";
        case Method::behavior_guided: return "behavior_guided";
    }
    return "baseline";
}

Method method_from_name(const std::string& name) {
    if (name == "baseline") return Method::baseline;
    if (name == "bci") return Method::bci;
    if (name == "critique_revise") return Method::critique_revise;
    if (name == "behavior_guided") return Method::behavior_guided;
    throw_invalid("unknown method: " + name);
}

std::vector<EvalRecord> grade_run_log(const std::vector<Trace>& traces,
                                      const std::vector<Question>& corpus, Method method) {
    std::unordered_map<std::string, const Question*> by_id;
    for (const Question& q : corpus) by_id.emplace(q.id, &q);

    std::set<std::tuple<std::string, int, int>> seen;
    std::vector<EvalRecord> out;
    out.reserve(traces.size());
    for (const Trace& t : traces) {
        auto it = by_id.find(t.question_id);
        if (it == by_id.end()) {
            throw_invalid("log question '" + t.question_id + "' is not in the corpus");
        }
        if (!it->second->reference_answer) {
            throw_invalid("question '" + t.question_id + "' has no reference answer");
        }
        if (!seen.insert({t.question_id, t.budget, t.sample_index}).second) {
            throw_invalid("log has duplicate sample " + std::to_string(t.sample_index) +
                          " for question '" + t.question_id + "' at budget " +
                          std::to_string(t.budget));
        }
        EvalRecord r;
        r.question_id = t.question_id;
        r.budget = t.budget;
        r.sample_index = t.sample_index;
        r.correct = grade(t, *it->second->reference_answer);
        r.output_tokens = t.output_tokens;
        r.method = method;
        out.push_back(std::move(r));
    }
    return out;
}

CurvePoint accuracy(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw_invalid("accuracy: no records");
    CurvePoint p;
    p.budget = records.front().budget;
    std::set<std::string> questions;
    double correct = 0.0;
    double tokens = 0.0;
    for (const EvalRecord& r : records) {
        if (r.budget != p.budget) {
            throw_invalid("accuracy: records span multiple budgets");
        }
        questions.insert(r.question_id);
        correct += r.correct ? 1.0 : 0.0;
        tokens += r.output_tokens;
    }
    p.mean_accuracy = correct / static_cast<double>(records.size());
    p.mean_output_tokens = tokens / static_cast<double>(records.size());
    p.n_questions = static_cast<int>(questions.size());
    p.n_samples = static_cast<int>(records.size()) / p.n_questions;
    return p;
}

double pass_at_k_sets(const std::vector<bool>& correctness, int k, int n_sets) {
    if (k < 1 || n_sets < 1) throw_invalid("pass_at_k_sets: k and n_sets must be >= 1");
    std::size_t needed = static_cast<std::size_t>(k) * static_cast<std::size_t>(n_sets);
    if (correctness.size() < needed) {
        throw_invalid("pass_at_k_sets: need " + std::to_string(needed) + " runs, have " +
                      std::to_string(correctness.size()));
    }
    int passed = 0;
    for (int s = 0; s < n_sets; ++s) {
        bool any = false;
        for (int i = 0; i < k; ++i) {
            if (correctness[static_cast<std::size_t>(s) * k + i]) {
                any = true;
                break;
            }
        }
        if (any) ++passed;
    }
    return static_cast<double>(passed) / static_cast<double>(n_sets);
}

double pass_at_k_unbiased(int n, int c, int k) {
    if (c < 0 || c > n) throw_invalid("pass_at_k_unbiased: need 0 <= c <= n");
    if (k < 1 || k > n) throw_invalid("pass_at_k_unbiased: need 1 <= k <= n");
    if (c == 0) return 0.0;
    if (n - c < k) return 1.0;
    // C(n-c, k)/C(n, k) = prod_{i=0..k-1} (n-c-i)/(n-i)
    double miss = 1.0;
    for (int i = 0; i < k; ++i) {
        miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
    }
    return 1.0 - miss;
}

std::map<std::string, std::vector<bool>> correctness_by_question(
    const std::vector<EvalRecord>& records) {
    std::map<std::string, std::vector<std::pair<int, bool>>> ordered;
    for (const EvalRecord& r : records) {
        ordered[r.question_id].emplace_back(r.sample_index, r.correct);
    }
    std::map<std::string, std::vector<bool>> out;
    for (auto& [qid, runs] : ordered) {
        std::sort(runs.begin(), runs.end());
        std::vector<bool>& v = out[qid];
        v.reserve(runs.size());
        for (auto& [idx, correct] : runs) v.push_back(correct);
    }
    return out;
}

double pass_at_k_over_questions(const std::vector<EvalRecord>& records, int k, int n_sets) {
    auto per_question = correctness_by_question(records);
    if (per_question.empty()) throw_invalid("pass_at_k_over_questions: no records");
    double sum = 0.0;
    for (const auto& [qid, correctness] : per_question) {
        sum += pass_at_k_sets(correctness, k, n_sets);
    }
    return sum / static_cast<double>(per_question.size());
}

SweepReport budget_sweep(Provider& provider, const PromptSet& prompts,
                         const std::vector<Question>& questions, Method method,
                         const std::vector<int>& budgets, const RunConfig& base_cfg,
                         const Handbook* handbook, const FlatIndex* index,
                         int parallelism) {
    if (budgets.empty()) throw_invalid("budget_sweep: budgets must be nonempty");
    if (!std::is_sorted(budgets.begin(), budgets.end()) ||
        std::adjacent_find(budgets.begin(), budgets.end()) != budgets.end()) {
        throw_invalid("budget_sweep: budgets must be strictly ascending");
    }
    bool needs_handbook = method == Method::bci || method == Method::behavior_guided;
    if (needs_handbook && method == Method::bci && !handbook) {
        throw_invalid("budget_sweep: bci needs a handbook");
    }

    SweepReport report;
    for (int budget : budgets) {
        RunConfig cfg = base_cfg;
        cfg.budget = budget;
        std::vector<EvalRecord> records;
        for (const Question& q : questions) {
            try {
                RunResult run;
                switch (method) {
                    case Method::baseline:
                        run = run_baseline(provider, prompts, q, cfg, parallelism);
                        break;
                    case Method::bci:
                        run = run_bci(provider, prompts, *handbook, index, q, cfg,
                                      parallelism);
                        break;
                    case Method::critique_revise: {
                        RunConfig r1 = base_cfg;
                        r1.budget = 2048;
                        run = run_critique_revise(provider, prompts, q, r1, cfg,
                                                  parallelism)
                                  .revisions;
                        break;
                    }
                    case Method::behavior_guided: {
                        RunConfig curate_cfg = base_cfg;
                        curate_cfg.budget = 2048;
                        run = run_behavior_guided_improvement(provider, prompts, q,
                                                              curate_cfg, cfg, 16,
                                                              parallelism)
                                  .revisions;
                        break;
                    }
                }
                std::vector<EvalRecord> graded =
                    grade_run_log(run.traces, questions, method);
                records.insert(records.end(), graded.begin(), graded.end());
                for (const SampleFailure& f : run.failures) {
                    report.failures.push_back("budget " + std::to_string(budget) + " '" +
                                              q.id + "' sample " +
                                              std::to_string(f.sample_index) + ": " +
                                              f.message);
                }
            } catch (const Error& e) {
                report.failures.push_back("budget " + std::to_string(budget) + " '" + q.id +
                                          "': " + e.what());
            }
        }
        if (!records.empty()) report.points.push_back(accuracy(records));
    }
    return report;
}

std::vector<SavingsRow> token_savings(const std::vector<CurvePoint>& curve_a,
                                      const std::vector<CurvePoint>& curve_b) {
    if (curve_a.size() != curve_b.size()) {
        throw_invalid("token_savings: curves cover different budget counts");
    }
    std::vector<SavingsRow> out;
    for (std::size_t i = 0; i < curve_a.size(); ++i) {
        if (curve_a[i].budget != curve_b[i].budget) {
            throw_invalid("token_savings: budget mismatch at position " + std::to_string(i));
        }
        SavingsRow row;
        row.budget = curve_a[i].budget;
        row.tokens_a = curve_a[i].mean_output_tokens;
        row.tokens_b = curve_b[i].mean_output_tokens;
        row.savings_fraction =
            row.tokens_b == 0.0 ? 0.0 : (row.tokens_b - row.tokens_a) / row.tokens_b;
        row.accuracy_a = curve_a[i].mean_accuracy;
        row.accuracy_b = curve_b[i].mean_accuracy;
        row.accuracy_delta = row.accuracy_a - row.accuracy_b;
        row.matches_or_improves = row.accuracy_a >= row.accuracy_b;
        out.push_back(row);
    }
    return out;
}

}  // namespace bhv
