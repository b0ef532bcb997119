#include "bhv/mock_provider.hpp"

#include "bhv/jsonl.hpp"
#include "bhv/util.hpp"

namespace bhv {

std::unique_ptr<MockProvider> MockProvider::from_script(const std::filesystem::path& path) {
    Json j = Json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw_parse("mock script " + path.string() + ": not a JSON object");
    }
    auto mock = std::make_unique<MockProvider>();
    mock->script_path_ = path.string();
    mock->dim_ = j.value("embedding_dim", std::size_t{0});
    for (const auto& rule : j.value("completions", Json::array())) {
        CompletionRule r;
        r.match_hash = rule.value("match_hash", "");
        r.match_substring = rule.value("match_substring", "");
        if (r.match_hash.empty() && r.match_substring.empty()) {
            throw_parse("mock script " + path.string() +
                        ": completion rule needs match_hash or match_substring");
        }
        if (rule.contains("texts")) {
            for (const auto& t : rule["texts"]) r.texts.push_back(t.get<std::string>());
        } else if (rule.contains("text")) {
            r.texts.push_back(rule["text"].get<std::string>());
        }
        if (r.texts.empty()) {
            throw_parse("mock script " + path.string() + ": completion rule has no text");
        }
        mock->completions_.push_back(std::move(r));
    }
    for (const auto& rule : j.value("embeddings", Json::array())) {
        EmbeddingRule r;
        r.match_exact = rule.value("match_exact", "");
        r.match_substring = rule.value("match_substring", "");
        if (r.match_exact.empty() && r.match_substring.empty()) {
            throw_parse("mock script " + path.string() +
                        ": embedding rule needs match_exact or match_substring");
        }
        if (!rule.contains("vector") || !rule["vector"].is_array()) {
            throw_parse("mock script " + path.string() + ": embedding rule has no vector");
        }
        for (const auto& x : rule["vector"]) {
            r.vector.values.push_back(static_cast<float>(x.get<double>()));
        }
        if (mock->dim_ == 0) mock->dim_ = r.vector.dim();
        if (r.vector.dim() != mock->dim_) {
            throw_parse("mock script " + path.string() + ": embedding dim mismatch");
        }
        mock->embeddings_.push_back(std::move(r));
    }
    return mock;
}

ChatResponse MockProvider::complete(const ChatRequest& req) {
    if (req.messages.empty()) throw_invalid("chat request has no messages");
    if (req.max_tokens < 1) throw_invalid("chat request max_tokens must be >= 1");
    std::string body = request_body_text(req);
    std::string hash = fnv1a64_hex(body);

    const CompletionRule* hit = nullptr;
    for (const CompletionRule& r : completions_) {
        if (!r.match_hash.empty() && r.match_hash == hash) {
            hit = &r;
            break;
        }
    }
    if (!hit) {
        for (const CompletionRule& r : completions_) {
            if (!r.match_substring.empty() &&
                body.find(r.match_substring) != std::string::npos) {
                hit = &r;
                break;
            }
        }
    }
    if (!hit) {
        std::string head = body.substr(0, 160);
        throw ProviderError(ProviderFailure::status,
                            "mock script " + script_path_ +
                                " has no rule for request (hash " + hash +
                                "): " + head,
                            /*retryable=*/false);
    }
    std::size_t variant = 0;
    if (hit->texts.size() > 1 && req.seed) {
        std::int64_t s = *req.seed % static_cast<std::int64_t>(hit->texts.size());
        if (s < 0) s += static_cast<std::int64_t>(hit->texts.size());
        variant = static_cast<std::size_t>(s);
    }
    const std::string& full = hit->texts[variant];

    ChatResponse resp;
    int words = count_words(full);
    if (words > req.max_tokens) {
        resp.text = truncate_words(full, req.max_tokens);
        resp.output_tokens = req.max_tokens;
        resp.truncated = true;
    } else {
        resp.text = full;
        resp.output_tokens = words;
        resp.truncated = false;
    }
    return resp;
}

std::vector<EmbeddingVector> MockProvider::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw_invalid("embed: empty batch");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        const EmbeddingRule* hit = nullptr;
        for (const EmbeddingRule& r : embeddings_) {
            if (!r.match_exact.empty() && r.match_exact == text) {
                hit = &r;
                break;
            }
        }
        if (!hit) {
            for (const EmbeddingRule& r : embeddings_) {
                if (!r.match_substring.empty() &&
                    text.find(r.match_substring) != std::string::npos) {
                    hit = &r;
                    break;
                }
            }
        }
        if (!hit) {
            throw ProviderError(ProviderFailure::status,
                                "mock script " + script_path_ +
                                    " has no embedding for text: " + text.substr(0, 160),
                                /*retryable=*/false);
        }
        out.push_back(hit->vector);
    }
    return out;
}

}  // namespace bhv
