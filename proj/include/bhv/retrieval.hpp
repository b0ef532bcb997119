#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bhv/handbook.hpp"
#include "bhv/index.hpp"
#include "bhv/provider.hpp"
#include "bhv/question.hpp"
#include "bhv/run_config.hpp"

namespace bhv {

// Embedding input for a behavior is its "name: instruction" line.
std::string behavior_embedding_text(const Behavior& b);

EmbeddingVector embed_text(Provider& provider, const std::string& text);

// Content-addressed embedding store persisted beside the index, so
// behavior representations are computed once and reused across builds.
class EmbeddingCache {
public:
    EmbeddingCache() = default;

    static EmbeddingCache load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    const EmbeddingVector* lookup(const std::string& text) const;
    void insert(const std::string& text, EmbeddingVector v);

    std::size_t size() const { return order_.size(); }
    std::size_t dim() const { return dim_; }

private:
    struct Entry {
        std::string key;  // fnv1a64 of text
        std::string text;
        EmbeddingVector vector;
    };
    std::vector<Entry> order_;
    std::unordered_map<std::string, std::size_t> by_text_;
    std::size_t dim_ = 0;
};

// Embeds every behavior (cache first, provider for misses) and builds a
// complete index in handbook order. Any embedding failure aborts the
// build: a partial index is never returned.
FlatIndex build_index(const std::vector<Behavior>& behaviors, Provider& provider,
                      EmbeddingCache* cache = nullptr);

// Topic mode returns every behavior matching q.topic (the MATH protocol);
// embedding mode returns the top-k by cosine over the index. An empty
// handbook yields an empty list so conditioned inference can degrade to
// the plain prompt.
std::vector<Behavior> retrieve_for_question(const Handbook& handbook, const FlatIndex* index,
                                            Provider* embedder, const Question& q,
                                            RetrievalMode mode, int k);

}  // namespace bhv
