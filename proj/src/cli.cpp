#include "bhv/cli.hpp"

#include <charconv>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "bhv/curation.hpp"
#include "bhv/grading.hpp"
#include "bhv/handbook.hpp"
#include "bhv/http_provider.hpp"
#include "bhv/inference.hpp"
#include "bhv/jsonl.hpp"
#include "bhv/metrics.hpp"
#include "bhv/mock_provider.hpp"
#include "bhv/retrieval.hpp"
#include "bhv/sft.hpp"

namespace bhv {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

std::string fmt_double(double d) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, ptr);
}

void print_error(const std::string& kind, const std::string& message) {
    Json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::invalid_input:
        case ErrorKind::parse:
            return kExitInvalid;
        default:
            return kExitPartial;
    }
}

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_input: return "invalid_input";
        case ErrorKind::parse: return "parse";
        case ErrorKind::io: return "io";
        case ErrorKind::provider: return "provider";
    }
    return "error";
}

// Input files are checked before any work (and before any provider
// call); a missing path is a usage error, not a runtime failure.
void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) return;
    if (!std::filesystem::exists(path)) {
        throw_invalid(what + " not found: " + path);
    }
}

// Flags shared by every provider-touching subcommand.
struct BackendFlags {
    std::string provider_config;
    std::string mock_script;
    std::int64_t seed = 0;
    int parallel = 4;

    void attach(CLI::App* cmd) {
        cmd->add_option("--provider", provider_config,
                        "Provider config JSON (OpenAI-compatible endpoint)");
        cmd->add_option("--mock", mock_script, "Deterministic mock script JSON");
        cmd->add_option("--seed", seed, "Base seed; per-sample seeds derive from it");
        cmd->add_option("--parallel", parallel, "Concurrency bound")->check(CLI::Range(1, 256));
    }

    std::unique_ptr<Provider> make() const {
        return make_provider_from_flags(provider_config, mock_script);
    }
};

struct DecodeFlags {
    double temperature = 0.6;
    double top_p = 0.95;
    std::string model;

    void attach(CLI::App* cmd) {
        cmd->add_option("--temperature", temperature, "Sampling temperature");
        cmd->add_option("--top-p", top_p, "Nucleus sampling cutoff");
        cmd->add_option("--model", model, "Model name override");
    }

    void apply(RunConfig& cfg, std::int64_t seed) const {
        cfg.temperature = temperature;
        cfg.top_p = top_p;
        cfg.model = model;
        cfg.seed = seed;
    }
};

// ---- curate ----------------------------------------------------------

struct CurateArgs {
    std::string corpus, prompts_dir, out, report, in_handbook;
    int n_traces = 16;
    int budget = 8192;
    BackendFlags backend;
    DecodeFlags decode;
};

int cmd_curate(const CurateArgs& args) {
    require_file(args.corpus, "corpus");
    require_file(args.backend.mock_script, "mock script");
    require_file(args.backend.provider_config, "provider config");
    require_file(args.in_handbook, "input handbook");
    std::vector<Question> questions = load_question_corpus(args.corpus);
    PromptSet prompts = args.prompts_dir.empty() ? PromptSet::defaults()
                                                 : PromptSet::load_dir(args.prompts_dir);
    Handbook handbook;
    if (!args.in_handbook.empty()) handbook = Handbook::load(args.in_handbook);

    RunConfig cfg;
    cfg.budget = args.budget;
    args.decode.apply(cfg, args.backend.seed);
    cfg.validate();
    if (args.n_traces < 1) throw_invalid("--n-traces must be >= 1");

    auto provider = args.backend.make();
    CurationReport report = curate_corpus(*provider, prompts, questions, args.n_traces,
                                          cfg, handbook, args.backend.parallel);
    handbook.save(args.out);
    std::string report_path = args.report.empty() ? args.out + ".report.json" : args.report;
    report.save(report_path);

    std::cout << "curated " << report.total_inserted << " behaviors from "
              << questions.size() << " questions -> " << args.out << "\n";
    return report.total_failures > 0 ? kExitPartial : kExitOk;
}

// ---- index -----------------------------------------------------------

struct IndexArgs {
    std::string handbook, out, cache;
    BackendFlags backend;
};

int cmd_index(const IndexArgs& args) {
    require_file(args.handbook, "handbook");
    require_file(args.backend.mock_script, "mock script");
    require_file(args.backend.provider_config, "provider config");
    Handbook handbook = Handbook::load(args.handbook);
    if (handbook.empty()) throw_invalid("handbook is empty; nothing to index");
    auto provider = args.backend.make();

    std::string cache_path = args.cache.empty() ? args.out + ".cache.jsonl" : args.cache;
    EmbeddingCache cache = EmbeddingCache::load(cache_path);
    if (cache.size() > 0 && provider->embedding_dim() > 0 &&
        cache.dim() != provider->embedding_dim()) {
        throw_invalid("embedding cache dim " + std::to_string(cache.dim()) +
                      " does not match provider dim " +
                      std::to_string(provider->embedding_dim()));
    }

    FlatIndex index = build_index(handbook.behaviors(), *provider, &cache);
    index.save(args.out);
    cache.save(cache_path);
    std::cout << "indexed " << index.size() << " behaviors (dim " << index.dim()
              << ") -> " << args.out << "\n";
    return kExitOk;
}

// ---- retrieve --------------------------------------------------------

struct RetrieveArgs {
    std::string index, query;
    int k = 40;
    BackendFlags backend;
};

int cmd_retrieve(const RetrieveArgs& args) {
    require_file(args.index, "index");
    require_file(args.backend.mock_script, "mock script");
    require_file(args.backend.provider_config, "provider config");
    if (args.query.empty()) throw_invalid("--query must be nonempty");
    FlatIndex index = FlatIndex::load(args.index);
    auto provider = args.backend.make();
    EmbeddingVector qv = embed_text(*provider, args.query);
    for (const ScoredName& r : index.query(qv, static_cast<std::size_t>(args.k))) {
        Json j;
        j["name"] = r.name;
        j["score"] = r.score;
        std::cout << j.dump() << "\n";
    }
    return kExitOk;
}

// ---- infer -----------------------------------------------------------

struct InferArgs {
    std::string mode;     // bci | baseline | self-improve
    std::string variant = "behavior";  // self-improve: behavior | revise
    std::string corpus, handbook, index, out, r1_out;
    std::string retrieval = "embedding";
    int budget = 2048;
    int samples = 1;
    int k = 40;
    int r1_budget = 2048;
    int curation_budget = 2048;
    int curation_traces = 16;
    BackendFlags backend;
    DecodeFlags decode;
};

int cmd_infer(const InferArgs& args) {
    require_file(args.corpus, "corpus");
    require_file(args.handbook, "handbook");
    require_file(args.index, "index");
    require_file(args.backend.mock_script, "mock script");
    require_file(args.backend.provider_config, "provider config");
    std::vector<Question> questions = load_question_corpus(args.corpus);
    PromptSet prompts = PromptSet::defaults();

    RunConfig cfg;
    cfg.budget = args.budget;
    cfg.n_samples = args.samples;
    cfg.k = args.k;
    cfg.retrieval_mode = args.retrieval == "topic" ? RetrievalMode::topic
                                                   : RetrievalMode::embedding;
    args.decode.apply(cfg, args.backend.seed);
    cfg.validate();

    // Validate everything the run will need before any provider call.
    Handbook handbook;
    FlatIndex index;
    bool have_index = false;
    if (args.mode == "bci") {
        if (args.handbook.empty()) throw_invalid("--mode bci needs --handbook");
        handbook = Handbook::load(args.handbook);
        if (cfg.retrieval_mode == RetrievalMode::topic) {
            for (const Question& q : questions) {
                if (!q.topic) {
                    throw_invalid("question '" + q.id +
                                  "' has no topic; topic retrieval cannot run");
                }
            }
        } else if (!handbook.empty()) {
            if (args.index.empty()) {
                throw_invalid("--mode bci with embedding retrieval needs --index");
            }
            index = FlatIndex::load(args.index);
            have_index = true;
        }
    } else if (args.mode == "self-improve") {
        if (args.variant != "behavior" && args.variant != "revise") {
            throw_invalid("--variant must be behavior or revise");
        }
    } else if (args.mode != "baseline") {
        throw_invalid("--mode must be bci, baseline, or self-improve");
    }

    auto provider = args.backend.make();
    std::vector<Trace> log;
    std::vector<Trace> r1_log;
    int failures = 0;

    for (const Question& q : questions) {
        if (args.mode == "bci") {
            RunResult run = run_bci(*provider, prompts, handbook,
                                    have_index ? &index : nullptr, q, cfg,
                                    args.backend.parallel);
            for (Trace& t : run.traces) log.push_back(std::move(t));
            failures += static_cast<int>(run.failures.size());
        } else if (args.mode == "baseline") {
            RunResult run = run_baseline(*provider, prompts, q, cfg, args.backend.parallel);
            for (Trace& t : run.traces) log.push_back(std::move(t));
            failures += static_cast<int>(run.failures.size());
        } else if (args.variant == "revise") {
            RunConfig cfg_r1 = cfg;
            cfg_r1.budget = args.r1_budget;
            cfg_r1.n_samples = 1;
            CritiqueReviseResult run = run_critique_revise(*provider, prompts, q, cfg_r1,
                                                           cfg, args.backend.parallel);
            r1_log.push_back(std::move(run.first_attempt));
            for (Trace& t : run.revisions.traces) log.push_back(std::move(t));
            failures += static_cast<int>(run.revisions.failures.size());
        } else {
            RunConfig cfg_curate = cfg;
            cfg_curate.budget = args.curation_budget;
            cfg_curate.n_samples = 1;
            BehaviorGuidedResult run = run_behavior_guided_improvement(
                *provider, prompts, q, cfg_curate, cfg, args.curation_traces,
                args.backend.parallel);
            for (Trace& t : run.revisions.traces) log.push_back(std::move(t));
            failures += static_cast<int>(run.revisions.failures.size() +
                                         run.curation_failures.size());
        }
    }

    save_run_log(log, args.out);
    if (!args.r1_out.empty() && !r1_log.empty()) save_run_log(r1_log, args.r1_out);
    std::cout << "wrote " << log.size() << " traces -> " << args.out << "\n";
    if (failures > 0) {
        print_error("provider", std::to_string(failures) + " samples failed");
        return kExitPartial;
    }
    return kExitOk;
}

// ---- build-sft -------------------------------------------------------

struct BuildSftArgs {
    std::string corpus, handbook, variant = "bc", out, report;
    int budget = 14000;
    BackendFlags backend;
    DecodeFlags decode;
};

int cmd_build_sft(const BuildSftArgs& args) {
    require_file(args.corpus, "corpus");
    require_file(args.handbook, "handbook");
    require_file(args.backend.mock_script, "mock script");
    require_file(args.backend.provider_config, "provider config");
    std::vector<Question> questions = load_question_corpus(args.corpus);
    PromptSet prompts = PromptSet::defaults();
    SftVariant variant = sft_variant_from_name(args.variant);
    if (variant == SftVariant::BC && args.handbook.empty()) {
        throw_invalid("--variant bc needs --handbook");
    }

    RunConfig cfg;
    cfg.budget = args.budget;
    args.decode.apply(cfg, args.backend.seed);
    cfg.validate();

    auto provider = args.backend.make();
    SftBuildResult result;
    if (variant == SftVariant::BC) {
        Handbook handbook = Handbook::load(args.handbook);
        result = build_bc_dataset(*provider, prompts, questions, handbook, cfg,
                                  args.backend.parallel);
    } else {
        result = build_sft_dataset(*provider, prompts, questions, cfg,
                                   args.backend.parallel);
    }
    export_dataset(result.pairs, args.out);

    DatasetValidation validation = validate_dataset(args.out, &questions);
    std::string report_path = args.report.empty() ? args.out + ".report.json" : args.report;
    atomic_write_file(report_path, validation.to_json());

    std::cout << "built " << result.report.built << " " << sft_variant_name(variant)
              << " pairs -> " << args.out << "\n";
    if (!validation.ok()) {
        print_error("invalid_input", "exported dataset failed validation");
        return kExitInvalid;
    }
    bool partial = !result.report.failures.empty() || !result.report.skipped.empty();
    return partial ? kExitPartial : kExitOk;
}

// ---- report ----------------------------------------------------------

struct ReportArgs {
    std::string baseline_log, bci_log, critique_log, behavior_log;
    std::string corpus, out_csv, out_json;
    int pass_k = 16;
    int pass_sets = 5;
};

int cmd_report(const ReportArgs& args) {
    require_file(args.corpus, "corpus");
    for (const std::string& p : {args.baseline_log, args.bci_log, args.critique_log,
                                 args.behavior_log}) {
        require_file(p, "run log");
    }
    std::vector<Question> corpus = load_question_corpus(args.corpus);

    struct MethodLog {
        Method method;
        std::string path;
    };
    std::vector<MethodLog> logs;
    if (!args.baseline_log.empty()) logs.push_back({Method::baseline, args.baseline_log});
    if (!args.bci_log.empty()) logs.push_back({Method::bci, args.bci_log});
    if (!args.critique_log.empty()) logs.push_back({Method::critique_revise, args.critique_log});
    if (!args.behavior_log.empty()) logs.push_back({Method::behavior_guided, args.behavior_log});
    if (logs.empty()) throw_invalid("report needs at least one log");

    // Grade every log and group records per (method, budget).
    std::map<std::string, std::map<int, std::vector<EvalRecord>>> grouped;
    std::set<int> budget_union;
    for (const MethodLog& ml : logs) {
        std::vector<Trace> traces = load_run_log(ml.path);
        if (traces.empty()) throw_invalid("log " + ml.path + " is empty");
        std::vector<EvalRecord> records = grade_run_log(traces, corpus, ml.method);
        auto& per_budget = grouped[method_name(ml.method)];
        for (EvalRecord& r : records) {
            budget_union.insert(r.budget);
            per_budget[r.budget].push_back(std::move(r));
        }
    }
    // Comparing curves only makes sense over one budget grid.
    for (const auto& [method, per_budget] : grouped) {
        if (per_budget.size() != budget_union.size()) {
            throw_invalid("log for '" + method + "' covers different budgets than the "
                          "other logs; re-run the sweep or report logs separately");
        }
    }

    bool pass_k_available = true;
    Json curves = Json::object();
    std::map<std::string, std::vector<CurvePoint>> curve_points;
    std::string csv = "budget,method,accuracy,pass@k,mean_tokens\n";
    for (const MethodLog& ml : logs) {
        const auto& per_budget = grouped[method_name(ml.method)];
        Json arr = Json::array();
        for (const auto& [budget, records] : per_budget) {
            CurvePoint p = accuracy(records);
            curve_points[method_name(ml.method)].push_back(p);
            std::string pass_str;
            Json pass_json = nullptr;
            auto per_question = correctness_by_question(records);
            bool enough = true;
            for (const auto& [qid, v] : per_question) {
                if (v.size() < static_cast<std::size_t>(args.pass_k) *
                                   static_cast<std::size_t>(args.pass_sets)) {
                    enough = false;
                    break;
                }
            }
            if (enough) {
                double pass = pass_at_k_over_questions(records, args.pass_k, args.pass_sets);
                pass_str = fmt_double(pass);
                pass_json = pass;
            } else {
                pass_k_available = false;
            }
            csv += std::to_string(budget) + "," + method_name(ml.method) + "," +
                   fmt_double(p.mean_accuracy) + "," + pass_str + "," +
                   fmt_double(p.mean_output_tokens) + "\n";
            Json point;
            point["budget"] = p.budget;
            point["accuracy"] = p.mean_accuracy;
            point["pass_at_k"] = pass_json;
            point["mean_tokens"] = p.mean_output_tokens;
            point["n_questions"] = p.n_questions;
            point["n_samples"] = p.n_samples;
            arr.push_back(std::move(point));
        }
        curves[method_name(ml.method)] = std::move(arr);
    }

    Json out;
    out["pass_k"] = args.pass_k;
    out["pass_sets"] = args.pass_sets;
    out["pass_at_k_available"] = pass_k_available;
    out["curves"] = std::move(curves);

    if (curve_points.count("bci") && curve_points.count("baseline")) {
        Json savings = Json::array();
        for (const SavingsRow& row :
             token_savings(curve_points["bci"], curve_points["baseline"])) {
            Json r;
            r["budget"] = row.budget;
            r["tokens_bci"] = row.tokens_a;
            r["tokens_baseline"] = row.tokens_b;
            r["savings_fraction"] = row.savings_fraction;
            r["accuracy_bci"] = row.accuracy_a;
            r["accuracy_baseline"] = row.accuracy_b;
            r["accuracy_delta"] = row.accuracy_delta;
            r["matches_or_improves"] = row.matches_or_improves;
            savings.push_back(std::move(r));
        }
        out["token_savings"] = std::move(savings);
    }

    if (!args.out_csv.empty()) atomic_write_file(args.out_csv, csv);
    if (!args.out_json.empty()) atomic_write_file(args.out_json, out.dump(2) + "\n");
    if (args.out_csv.empty() && args.out_json.empty()) std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"behavior handbook toolkit: curate, retrieve, and reuse "
                 "reasoning behaviors under token budgets"};
    app.require_subcommand(1);

    CurateArgs curate;
    auto* c = app.add_subcommand("curate", "Extract behaviors from a question corpus");
    c->add_option("--corpus", curate.corpus, "Question corpus JSONL")->required();
    c->add_option("--prompts-dir", curate.prompts_dir, "Prompt template directory");
    c->add_option("--n-traces", curate.n_traces, "Reasoning traces per question");
    c->add_option("--budget", curate.budget, "Token budget per pipeline stage");
    c->add_option("--out", curate.out, "Output handbook JSONL")->required();
    c->add_option("--report", curate.report, "Curation report JSON path");
    c->add_option("--in", curate.in_handbook, "Existing handbook to grow");
    curate.backend.attach(c);
    curate.decode.attach(c);

    IndexArgs index;
    auto* i = app.add_subcommand("index", "Build the embedding index for a handbook");
    i->add_option("--handbook", index.handbook, "Handbook JSONL")->required();
    i->add_option("--out", index.out, "Output index file")->required();
    i->add_option("--cache", index.cache, "Embedding cache path (default <out>.cache.jsonl)");
    index.backend.attach(i);

    RetrieveArgs retrieve;
    auto* r = app.add_subcommand("retrieve", "Query the index for the top-k behaviors");
    r->add_option("--index", retrieve.index, "Index file")->required();
    r->add_option("--query", retrieve.query, "Query text")->required();
    r->add_option("--k", retrieve.k, "Results to return")->check(CLI::Range(1, 1 << 20));
    retrieve.backend.attach(r);

    InferArgs infer;
    auto* f = app.add_subcommand("infer", "Run conditioned, baseline, or self-improvement inference");
    f->add_option("--mode", infer.mode, "bci | baseline | self-improve")->required();
    f->add_option("--variant", infer.variant, "self-improve arm: behavior | revise");
    f->add_option("--corpus", infer.corpus, "Question corpus JSONL")->required();
    f->add_option("--handbook", infer.handbook, "Handbook JSONL");
    f->add_option("--index", infer.index, "Index file (embedding retrieval)");
    f->add_option("--retrieval", infer.retrieval, "topic | embedding");
    f->add_option("--budget", infer.budget, "Token budget per generation");
    f->add_option("--samples", infer.samples, "Samples per question");
    f->add_option("--k", infer.k, "Behaviors to retrieve");
    f->add_option("--r1-budget", infer.r1_budget, "First-attempt budget (self-improve)");
    f->add_option("--curation-budget", infer.curation_budget,
                  "Per-stage curation budget (self-improve behavior arm)");
    f->add_option("--curation-traces", infer.curation_traces,
                  "Curation traces per question (self-improve behavior arm)");
    f->add_option("--out", infer.out, "Output run log JSONL")->required();
    f->add_option("--r1-out", infer.r1_out, "Optional log for first attempts");
    infer.backend.attach(f);
    infer.decode.attach(f);

    BuildSftArgs sft;
    auto* s = app.add_subcommand("build-sft", "Export a training dataset");
    s->add_option("--corpus", sft.corpus, "Question corpus JSONL")->required();
    s->add_option("--handbook", sft.handbook, "Handbook JSONL (bc variant)");
    s->add_option("--variant", sft.variant, "bc | sft");
    s->add_option("--out", sft.out, "Output dataset JSONL")->required();
    s->add_option("--budget", sft.budget, "Teacher token budget");
    s->add_option("--report", sft.report, "Validation report path");
    sft.backend.attach(s);
    sft.decode.attach(s);

    ReportArgs report;
    auto* p = app.add_subcommand("report", "Grade run logs and emit metric curves");
    p->add_option("--baseline", report.baseline_log, "Baseline run log");
    p->add_option("--bci", report.bci_log, "Conditioned run log");
    p->add_option("--critique-revise", report.critique_log, "Critique-and-revise run log");
    p->add_option("--behavior-guided", report.behavior_log, "Behavior-guided run log");
    p->add_option("--corpus", report.corpus, "Corpus with reference answers")->required();
    p->add_option("--out-csv", report.out_csv, "Metrics CSV path");
    p->add_option("--out-json", report.out_json, "Metrics JSON path");
    p->add_option("--pass-k", report.pass_k, "k for pass@k");
    p->add_option("--pass-sets", report.pass_sets, "Consecutive sets for pass@k");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        print_error("invalid_input", e.what());
        return kExitInvalid;
    }

    try {
        if (c->parsed()) return cmd_curate(curate);
        if (i->parsed()) return cmd_index(index);
        if (r->parsed()) return cmd_retrieve(retrieve);
        if (f->parsed()) return cmd_infer(infer);
        if (s->parsed()) return cmd_build_sft(sft);
        if (p->parsed()) return cmd_report(report);
    } catch (const Error& e) {
        print_error(error_kind_name(e.kind()), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        print_error("error", e.what());
        return kExitPartial;
    }
    return kExitInvalid;
}

}  // namespace bhv
