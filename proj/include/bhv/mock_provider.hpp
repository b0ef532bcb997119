#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "bhv/provider.hpp"

namespace bhv {

// Deterministic scripted backend for offline runs and tests.
//
// Script file (JSON):
//   {
//     "embedding_dim": 8,
//     "completions": [
//       {"match_hash": "<fnv1a64 hex of the request text>", "text": "…"},
//       {"match_substring": "…", "text": "…"},
//       {"match_substring": "…", "texts": ["…", "…"]}
//     ],
//     "embeddings": [
//       {"match_exact": "…", "vector": [...]},
//       {"match_substring": "…", "vector": [...]}
//     ]
//   }
//
// Completion matching precedence: exact request hash first, then the
// first substring rule in script order. A "texts" rule answers with
// texts[seed % texts.size()], so repeated samples with distinct seeds
// draw scripted variants without any hidden state. Unmatched requests
// are errors: scripts must be exhaustive.
class MockProvider : public Provider {
public:
    static std::unique_ptr<MockProvider> from_script(const std::filesystem::path& path);

    ChatResponse complete(const ChatRequest& req) override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t embedding_dim() const override { return dim_; }
    std::string name() const override { return "mock"; }

private:
    struct CompletionRule {
        std::string match_hash;       // empty unless hash rule
        std::string match_substring;  // empty unless substring rule
        std::vector<std::string> texts;
    };
    struct EmbeddingRule {
        std::string match_exact;
        std::string match_substring;
        EmbeddingVector vector;
    };

    std::vector<CompletionRule> completions_;
    std::vector<EmbeddingRule> embeddings_;
    std::size_t dim_ = 0;
    std::string script_path_;
};

}  // namespace bhv
