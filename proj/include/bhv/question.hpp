#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bhv {

struct Question {
    std::string id;
    std::string text;
    std::optional<std::string> topic;
    std::optional<std::string> reference_answer;
};

// Corpus file: JSONL with keys id, text, topic (nullable),
// reference_answer (nullable). Duplicate ids and empty text are errors.
std::vector<Question> load_question_corpus(const std::filesystem::path& path);

void save_question_corpus(const std::vector<Question>& questions,
                          const std::filesystem::path& path);

}  // namespace bhv
