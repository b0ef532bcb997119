#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bhv/errors.hpp"

namespace bhv {

enum class RetrievalMode { topic, embedding };

inline const char* retrieval_mode_name(RetrievalMode m) {
    return m == RetrievalMode::topic ? "topic" : "embedding";
}

struct RunConfig {
    int budget = 2048;          // hard cap on generated tokens
    double temperature = 0.6;
    double top_p = 0.95;
    int n_samples = 1;
    RetrievalMode retrieval_mode = RetrievalMode::embedding;
    int k = 40;
    std::optional<std::int64_t> seed;
    std::string model;

    void validate() const {
        if (budget < 1) throw_invalid("budget must be >= 1");
        if (n_samples < 1) throw_invalid("n_samples must be >= 1");
        if (top_p < 0.0 || top_p > 1.0) throw_invalid("top_p must be in [0, 1]");
        if (k < 1) throw_invalid("k must be >= 1");
    }
};

}  // namespace bhv
