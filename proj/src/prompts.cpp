#include "bhv/prompts.hpp"

#include <fstream>
#include <sstream>

#include "bhv/errors.hpp"

namespace bhv {

namespace {

const char* kSolutionDefault =
    "Solve the following problem. Reason step by step, showing your full "
    "chain of thought, and finish by stating the final answer in "
    "\\boxed{} format.\n"
    "\n"
    "Problem:\n"
    "{{question}}\n";

const char* kReflectionDefault =
    "You will be shown a problem and a proposed solution. Write a "
    "reflection on the solution: evaluate whether the reasoning is "
    "logically sound, whether the final answer is correct, and whether "
    "any new, reusable behaviors could be distilled from this solution "
    "to streamline future problem solving. A behavior is a concise, "
    "generally applicable piece of problem-solving knowledge.\n"
    "\n"
    "Problem:\n"
    "{{question}}\n"
    "\n"
    "Solution:\n"
    "{{solution}}\n";

const char* kBehaviorDefault =
    "You will be shown a problem, a solution, and a reflection on that "
    "solution. Convert them into a list of reusable behaviors. Each "
    "behavior is a short snake_case name followed by an instruction that "
    "another solver could apply to future problems.\n"
    "\n"
    "Output one behavior per line, exactly in this format:\n"
    "behavior_name: instruction\n"
    "\n"
    "Problem:\n"
    "{{question}}\n"
    "\n"
    "Solution:\n"
    "{{solution}}\n"
    "\n"
    "Reflection:\n"
    "{{reflection}}\n";

const char* kBciDefault =
    "You have access to a handbook of behaviors: reusable problem-solving "
    "instructions, one per line as name: instruction. Use the relevant "
    "behaviors to guide your reasoning, and cite a behavior by its name "
    "whenever you apply it.\n"
    "\n"
    "Behaviors:\n"
    "{{behaviors}}\n"
    "\n"
    "Solve the following problem. Reason step by step, showing your full "
    "chain of thought, and finish by stating the final answer in "
    "\\boxed{} format.\n"
    "\n"
    "Problem:\n"
    "{{question}}\n";

const char* kBaselineDefault =
    "Solve the following problem. Reason step by step, showing your full "
    "chain of thought, and finish by stating the final answer in "
    "\\boxed{} format.\n"
    "\n"
    "Problem:\n"
    "{{question}}\n";

const char* kReviseDefault =
    "You will be shown a problem and your previous attempt at solving it. "
    "Critique the attempt: identify any errors or incomplete reasoning. "
    "Then produce an improved solution, reasoning step by step, and "
    "finish by stating the final answer in \\boxed{} format.\n"
    "\n"
    "Problem:\n"
    "{{question}}\n"
    "\n"
    "Previous attempt:\n"
    "{{first_attempt}}\n";

std::string read_if_exists(const std::filesystem::path& path, const char* fallback) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fallback;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void require_placeholder(const std::string& tmpl, const std::string& key,
                         const std::string& which) {
    if (tmpl.find("{{" + key + "}}") == std::string::npos) {
        throw_invalid(which + " template is missing the {{" + key + "}} placeholder");
    }
}

}  // namespace

PromptSet PromptSet::defaults() {
    PromptSet p;
    p.solution = kSolutionDefault;
    p.reflection = kReflectionDefault;
    p.behavior = kBehaviorDefault;
    p.bci = kBciDefault;
    p.baseline = kBaselineDefault;
    p.revise = kReviseDefault;
    return p;
}

PromptSet PromptSet::load_dir(const std::filesystem::path& dir) {
    PromptSet p;
    p.solution = read_if_exists(dir / "solution.txt", kSolutionDefault);
    p.reflection = read_if_exists(dir / "reflection.txt", kReflectionDefault);
    p.behavior = read_if_exists(dir / "behavior.txt", kBehaviorDefault);
    p.bci = read_if_exists(dir / "bci.txt", kBciDefault);
    p.baseline = read_if_exists(dir / "baseline.txt", kBaselineDefault);
    p.revise = read_if_exists(dir / "revise.txt", kReviseDefault);
    require_placeholder(p.solution, "question", "solution");
    require_placeholder(p.reflection, "question", "reflection");
    require_placeholder(p.reflection, "solution", "reflection");
    require_placeholder(p.behavior, "question", "behavior");
    require_placeholder(p.behavior, "solution", "behavior");
    require_placeholder(p.behavior, "reflection", "behavior");
    require_placeholder(p.bci, "behaviors", "bci");
    require_placeholder(p.bci, "question", "bci");
    require_placeholder(p.baseline, "question", "baseline");
    require_placeholder(p.revise, "question", "revise");
    require_placeholder(p.revise, "first_attempt", "revise");
    return p;
}

std::string render_prompt(const std::string& tmpl,
                          const std::map<std::string, std::string>& values) {
    std::string out = tmpl;
    for (const auto& [key, value] : values) {
        std::string token = "{{" + key + "}}";
        std::size_t pos = out.find(token);
        if (pos == std::string::npos) {
            throw_invalid("template has no {{" + key + "}} placeholder");
        }
        while (pos != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos = out.find(token, pos + value.size());
        }
    }
    return out;
}

}  // namespace bhv
