#include "bhv/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>

#include "bhv/jsonl.hpp"
#include "bhv/mock_provider.hpp"
#include "bhv/util.hpp"

namespace bhv {

namespace {

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // e.g. "/v1"
};

Endpoint split_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw_invalid("endpoint must include scheme: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string::npos) {
        ep.base = url;
    } else {
        ep.base = url.substr(0, path_start);
        ep.path = url.substr(path_start);
    }
    while (!ep.path.empty() && ep.path.back() == '/') ep.path.pop_back();
    return ep;
}

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig config)
        : config_(std::move(config)),
          endpoint_(split_endpoint(config_.endpoint)),
          limiter_(config_.max_in_flight) {
        if (!config_.api_key_env.empty()) {
            if (const char* key = std::getenv(config_.api_key_env.c_str())) {
                api_key_ = key;
            }
        }
    }

    ChatResponse complete(const ChatRequest& req) override {
        if (req.messages.empty()) throw_invalid("chat request has no messages");
        if (req.max_tokens < 1) throw_invalid("chat request max_tokens must be >= 1");
        Json body;
        body["model"] = req.model.empty() ? config_.model : req.model;
        Json messages = Json::array();
        for (const ChatMessage& m : req.messages) {
            messages.push_back({{"role", m.role}, {"content", m.content}});
        }
        body["messages"] = std::move(messages);
        body["max_tokens"] = req.max_tokens;
        body["temperature"] = req.temperature;
        body["top_p"] = req.top_p;
        if (req.seed) body["seed"] = *req.seed;

        Json resp = post_json("/chat/completions", body);
        if (!resp.contains("choices") || !resp["choices"].is_array() ||
            resp["choices"].empty()) {
            throw ProviderError(ProviderFailure::status,
                                "chat response has no choices", false);
        }
        const Json& choice = resp["choices"][0];
        ChatResponse out;
        // Some servers return null content or a legacy "text" field.
        if (choice.contains("message") && choice["message"].is_object() &&
            choice["message"].contains("content") &&
            choice["message"]["content"].is_string()) {
            out.text = choice["message"]["content"].get<std::string>();
        } else if (choice.contains("text") && choice["text"].is_string()) {
            out.text = choice["text"].get<std::string>();
        }
        if (resp.contains("usage") && resp["usage"].is_object() &&
            resp["usage"].contains("completion_tokens") &&
            resp["usage"]["completion_tokens"].is_number()) {
            out.output_tokens = resp["usage"]["completion_tokens"].get<int>();
        } else {
            out.output_tokens = count_words(out.text);
        }
        out.truncated = choice.contains("finish_reason") &&
                        choice["finish_reason"].is_string() &&
                        choice["finish_reason"].get<std::string>() == "length";
        if (out.truncated) out.output_tokens = req.max_tokens;
        return out;
    }

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        if (texts.empty()) throw_invalid("embed: empty batch");
        Json body;
        body["model"] = config_.embedding_model;
        body["input"] = texts;
        Json resp = post_json("/embeddings", body);
        if (!resp.contains("data") || !resp["data"].is_array() ||
            resp["data"].size() != texts.size()) {
            throw ProviderError(ProviderFailure::status,
                                "embeddings response size mismatch", false);
        }
        std::vector<EmbeddingVector> out(texts.size());
        std::size_t position = 0;
        for (const auto& item : resp["data"]) {
            std::size_t idx = position++;
            if (item.contains("index") && item["index"].is_number_unsigned()) {
                idx = item["index"].get<std::size_t>();
            }
            if (idx >= out.size() || !item.contains("embedding") ||
                !item["embedding"].is_array()) {
                throw ProviderError(ProviderFailure::status,
                                    "embeddings response is malformed", false);
            }
            for (const auto& x : item["embedding"]) {
                out[idx].values.push_back(static_cast<float>(x.get<double>()));
            }
        }
        std::size_t dim = out.front().dim();
        for (const auto& v : out) {
            if (v.dim() != dim) {
                throw ProviderError(ProviderFailure::status,
                                    "embeddings response has mixed dims", false);
            }
        }
        {
            std::lock_guard lock(dim_mu_);
            if (dim_ == 0) dim_ = dim;
            else if (dim_ != dim) {
                throw ProviderError(ProviderFailure::status,
                                    "embedding dim changed across batches", false);
            }
        }
        return out;
    }

    std::size_t embedding_dim() const override {
        std::lock_guard lock(dim_mu_);
        return dim_;
    }

    std::string name() const override { return "http:" + config_.endpoint; }

private:
    Json post_json(const std::string& route, const Json& body) {
        std::string payload = body.dump();
        return with_retries(config_.retry, [&]() -> Json {
            ConcurrencyLimiter::Ticket ticket(limiter_);
            httplib::Client client(endpoint_.base);
            client.set_connection_timeout(config_.timeout_s, 0);
            client.set_read_timeout(config_.timeout_s, 0);
            client.set_write_timeout(config_.timeout_s, 0);
            httplib::Headers headers;
            if (!api_key_.empty()) {
                headers.emplace("Authorization", "Bearer " + api_key_);
            }
            auto res = client.Post(endpoint_.path + route, headers, payload,
                                   "application/json");
            if (!res) {
                bool timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                                 res.error() == httplib::Error::Read ||
                                 res.error() == httplib::Error::Write;
                throw ProviderError(
                    timed_out ? ProviderFailure::timeout : ProviderFailure::transport,
                    "request to " + endpoint_.base + route + " failed: " +
                        httplib::to_string(res.error()),
                    /*retryable=*/true);
            }
            if (res->status < 200 || res->status >= 300) {
                throw ProviderError(ProviderFailure::status,
                                    "HTTP " + std::to_string(res->status) + " from " +
                                        route + ": " + res->body.substr(0, 300),
                                    retryable_status(res->status));
            }
            Json parsed = Json::parse(res->body, nullptr, false);
            if (parsed.is_discarded()) {
                throw ProviderError(ProviderFailure::status,
                                    "response from " + route + " is not JSON", false);
            }
            return parsed;
        });
    }

    ProviderConfig config_;
    Endpoint endpoint_;
    std::string api_key_;
    ConcurrencyLimiter limiter_;
    mutable std::mutex dim_mu_;
    std::size_t dim_ = 0;
};

}  // namespace

ProviderConfig ProviderConfig::load(const std::filesystem::path& path) {
    Json j = Json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw_parse("provider config " + path.string() + ": not a JSON object");
    }
    ProviderConfig cfg;
    cfg.endpoint = j.value("endpoint", "");
    if (cfg.endpoint.empty()) {
        throw_invalid("provider config " + path.string() + ": missing endpoint");
    }
    cfg.model = j.value("model", "");
    cfg.embedding_model = j.value("embedding_model", "");
    cfg.api_key_env = j.value("api_key_env", "");
    cfg.timeout_s = j.value("timeout_s", 120);
    cfg.retry.max_attempts = j.value("max_retries", 3);
    cfg.retry.base_backoff_ms = j.value("retry_base_ms", 200);
    cfg.max_in_flight = j.value("max_in_flight", 8);
    return cfg;
}

std::unique_ptr<Provider> make_http_provider(const ProviderConfig& config) {
    return std::make_unique<HttpProvider>(config);
}

std::unique_ptr<Provider> make_provider_from_flags(const std::string& provider_config,
                                                   const std::string& mock_script) {
    if (!provider_config.empty() && !mock_script.empty()) {
        throw_invalid("--provider and --mock are mutually exclusive");
    }
    if (!mock_script.empty()) return MockProvider::from_script(mock_script);
    if (!provider_config.empty()) {
        return make_http_provider(ProviderConfig::load(provider_config));
    }
    throw_invalid("a backend is required: pass --provider <config.json> or --mock <script.json>");
}

}  // namespace bhv
