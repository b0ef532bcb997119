#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace bhv {

// Prompt templates are plain text with {{placeholder}} substitutions.
// Shipped defaults live in prompts/; a custom directory can override any
// of solution.txt, reflection.txt, behavior.txt, bci.txt, baseline.txt,
// revise.txt.
struct PromptSet {
    std::string solution;    // {{question}}
    std::string reflection;  // {{question}} {{solution}}
    std::string behavior;    // {{question}} {{solution}} {{reflection}}
    std::string bci;         // {{behaviors}} {{question}}
    std::string baseline;    // {{question}}
    std::string revise;      // {{question}} {{first_attempt}}

    static PromptSet defaults();
    // Missing files fall back to the defaults; present files must carry
    // the placeholders their stage substitutes.
    static PromptSet load_dir(const std::filesystem::path& dir);
};

// Replaces every {{key}} with its value. Unknown placeholders are left
// untouched; a value for a key the template lacks is an error.
std::string render_prompt(const std::string& tmpl,
                          const std::map<std::string, std::string>& values);

}  // namespace bhv
