#include "bhv/question.hpp"

#include <unordered_set>

#include "bhv/errors.hpp"
#include "bhv/jsonl.hpp"

namespace bhv {

std::vector<Question> load_question_corpus(const std::filesystem::path& path) {
    std::vector<Question> out;
    std::unordered_set<std::string> seen;
    for_each_jsonl_line(path, [&](int line_no, const Json& j) {
        auto fail = [&](const std::string& msg) {
            throw_parse(path.string() + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
            !j.contains("text") || !j["text"].is_string()) {
            fail("question line needs string id and text");
        }
        Question q;
        q.id = j["id"].get<std::string>();
        q.text = j["text"].get<std::string>();
        if (q.text.empty()) fail("empty question text");
        if (!seen.insert(q.id).second) fail("duplicate question id: " + q.id);
        if (j.contains("topic") && j["topic"].is_string()) {
            q.topic = j["topic"].get<std::string>();
        }
        if (j.contains("reference_answer") && j["reference_answer"].is_string()) {
            q.reference_answer = j["reference_answer"].get<std::string>();
        }
        out.push_back(std::move(q));
    });
    return out;
}

void save_question_corpus(const std::vector<Question>& questions,
                          const std::filesystem::path& path) {
    std::string out;
    for (const Question& q : questions) {
        Json j;
        j["id"] = q.id;
        j["text"] = q.text;
        j["topic"] = q.topic ? Json(*q.topic) : Json(nullptr);
        j["reference_answer"] = q.reference_answer ? Json(*q.reference_answer) : Json(nullptr);
        out += to_jsonl_line(j);
    }
    atomic_write_file(path, out);
}

}  // namespace bhv
