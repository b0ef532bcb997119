#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bhv/errors.hpp"
#include "bhv/index.hpp"

namespace bhv {

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    int max_tokens = 1;
    double temperature = 0.0;
    double top_p = 1.0;
    std::string model;
    // Per-sample decode seed; forwarded to the backend and used by the
    // mock to pick among scripted response variants.
    std::optional<std::int64_t> seed;
};

struct ChatResponse {
    std::string text;
    int output_tokens = 0;
    bool truncated = false;  // implies output_tokens == max_tokens
};

// Concatenated message contents; the identity of a request for mock
// matching and caching purposes.
std::string request_body_text(const ChatRequest& req);

class Provider {
public:
    virtual ~Provider() = default;
    virtual ChatResponse complete(const ChatRequest& req) = 0;
    // One vector per input text, all the same dimension. A failure for any
    // text fails the whole batch; retrying the batch is safe.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual std::size_t embedding_dim() const = 0;
    virtual std::string name() const = 0;
};

enum class ProviderFailure { transport, status, timeout };

class ProviderError : public Error {
public:
    ProviderError(ProviderFailure failure, std::string message, bool retryable)
        : Error(ErrorKind::provider, std::move(message)),
          failure_(failure),
          retryable_(retryable) {}

    ProviderFailure failure() const noexcept { return failure_; }
    bool retryable() const noexcept { return retryable_; }

private:
    ProviderFailure failure_;
    bool retryable_;
};

struct RetryPolicy {
    int max_attempts = 3;
    int base_backoff_ms = 200;
};

// Runs op, retrying retryable provider errors with exponential backoff.
// Non-retryable errors and exhaustion propagate.
template <typename Op>
auto with_retries(const RetryPolicy& policy, Op&& op) -> decltype(op()) {
    int attempt = 0;
    for (;;) {
        try {
            return op();
        } catch (const ProviderError& e) {
            ++attempt;
            if (!e.retryable() || attempt >= policy.max_attempts) throw;
            auto delay = std::chrono::milliseconds(
                static_cast<long>(policy.base_backoff_ms) * (1L << (attempt - 1)));
            std::this_thread::sleep_for(delay);
        }
    }
}

// Fair FIFO admission for a bounded number of in-flight requests.
class ConcurrencyLimiter {
public:
    explicit ConcurrencyLimiter(int max_in_flight)
        : max_in_flight_(max_in_flight < 1 ? 1 : max_in_flight) {}

    class Ticket {
    public:
        explicit Ticket(ConcurrencyLimiter& limiter) : limiter_(limiter) {
            limiter_.acquire();
        }
        ~Ticket() { limiter_.release(); }
        Ticket(const Ticket&) = delete;
        Ticket& operator=(const Ticket&) = delete;

    private:
        ConcurrencyLimiter& limiter_;
    };

private:
    void acquire() {
        std::unique_lock lock(mu_);
        std::uint64_t my_turn = next_ticket_++;
        cv_.wait(lock, [&] {
            return my_turn == now_serving_ && in_flight_ < max_in_flight_;
        });
        ++now_serving_;
        ++in_flight_;
        cv_.notify_all();
    }

    void release() {
        {
            std::lock_guard lock(mu_);
            --in_flight_;
        }
        cv_.notify_all();
    }

    int max_in_flight_;
    int in_flight_ = 0;
    std::uint64_t next_ticket_ = 0;
    std::uint64_t now_serving_ = 0;
    std::mutex mu_;
    std::condition_variable cv_;
};

}  // namespace bhv
