#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "bhv/provider.hpp"

namespace bhv {

// Connection settings for an OpenAI-compatible serving endpoint. Loaded
// from a JSON config file:
//   {
//     "endpoint": "http://localhost:8000/v1",
//     "model": "...",
//     "embedding_model": "...",
//     "api_key_env": "BHV_API_KEY",     // secret stays in the environment
//     "timeout_s": 120,
//     "max_retries": 3,
//     "retry_base_ms": 200,
//     "max_in_flight": 8
//   }
struct ProviderConfig {
    std::string endpoint;
    std::string model;
    std::string embedding_model;
    std::string api_key_env;
    int timeout_s = 120;
    RetryPolicy retry;
    int max_in_flight = 8;

    static ProviderConfig load(const std::filesystem::path& path);
};

// Chat-completions + embeddings client. Transport errors, timeouts and
// retryable statuses (429, 5xx) are retried with exponential backoff;
// other statuses fail immediately. A fair FIFO limiter bounds in-flight
// requests across all threads sharing the instance.
std::unique_ptr<Provider> make_http_provider(const ProviderConfig& config);

// --provider config.json | --mock script.json
std::unique_ptr<Provider> make_provider_from_flags(const std::string& provider_config,
                                                   const std::string& mock_script);

}  // namespace bhv
