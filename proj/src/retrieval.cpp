#include "bhv/retrieval.hpp"

#include "bhv/errors.hpp"
#include "bhv/jsonl.hpp"
#include "bhv/util.hpp"

namespace bhv {

std::string behavior_embedding_text(const Behavior& b) {
    return behavior_line(b);
}

EmbeddingVector embed_text(Provider& provider, const std::string& text) {
    if (text.empty()) throw_invalid("embed_text: empty text");
    std::vector<EmbeddingVector> batch = provider.embed({text});
    if (batch.size() != 1) throw_provider("embed_text: provider returned wrong batch size");
    std::string err = embedding_validation_error(batch.front());
    if (!err.empty()) throw_provider("embed_text: " + err);
    return std::move(batch.front());
}

EmbeddingCache EmbeddingCache::load(const std::filesystem::path& path) {
    EmbeddingCache cache;
    if (!std::filesystem::exists(path)) return cache;
    for_each_jsonl_line(path, [&](int line_no, const Json& j) {
        if (!j.is_object() || !j.contains("text") || !j.contains("vector")) {
            throw_parse(path.string() + ":" + std::to_string(line_no) +
                        ": cache line needs text and vector");
        }
        EmbeddingVector v;
        for (const auto& x : j["vector"]) {
            v.values.push_back(static_cast<float>(x.get<double>()));
        }
        cache.insert(j["text"].get<std::string>(), std::move(v));
    });
    return cache;
}

void EmbeddingCache::save(const std::filesystem::path& path) const {
    std::string out;
    for (const Entry& e : order_) {
        Json j;
        j["key"] = e.key;
        j["text"] = e.text;
        Json vec = Json::array();
        for (float x : e.vector.values) vec.push_back(static_cast<double>(x));
        j["vector"] = std::move(vec);
        out += to_jsonl_line(j);
    }
    atomic_write_file(path, out);
}

const EmbeddingVector* EmbeddingCache::lookup(const std::string& text) const {
    auto it = by_text_.find(text);
    return it == by_text_.end() ? nullptr : &order_[it->second].vector;
}

void EmbeddingCache::insert(const std::string& text, EmbeddingVector v) {
    if (by_text_.count(text)) return;
    if (dim_ == 0) {
        dim_ = v.dim();
    } else if (v.dim() != dim_) {
        throw_invalid("embedding cache dim mismatch: have " + std::to_string(dim_) +
                      ", inserting " + std::to_string(v.dim()));
    }
    by_text_.emplace(text, order_.size());
    order_.push_back({fnv1a64_hex(text), text, std::move(v)});
}

FlatIndex build_index(const std::vector<Behavior>& behaviors, Provider& provider,
                      EmbeddingCache* cache) {
    if (behaviors.empty()) throw_invalid("build_index: no behaviors");

    std::vector<std::string> texts(behaviors.size());
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
        texts[i] = behavior_embedding_text(behaviors[i]);
    }

    std::vector<const EmbeddingVector*> resolved(texts.size(), nullptr);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        if (cache) resolved[i] = cache->lookup(texts[i]);
        if (!resolved[i]) missing.push_back(texts[i]);
    }

    std::vector<EmbeddingVector> fresh;
    if (!missing.empty()) {
        fresh = provider.embed(missing);
        if (fresh.size() != missing.size()) {
            throw_provider("build_index: provider returned " + std::to_string(fresh.size()) +
                           " vectors for " + std::to_string(missing.size()) + " texts");
        }
    }

    FlatIndex index;
    std::size_t next_fresh = 0;
    for (std::size_t i = 0; i < behaviors.size(); ++i) {
        const EmbeddingVector* v = resolved[i];
        if (!v) {
            if (cache) {
                cache->insert(texts[i], fresh[next_fresh]);
                v = cache->lookup(texts[i]);
            } else {
                v = &fresh[next_fresh];
            }
            ++next_fresh;
        }
        index.add(behaviors[i].name, *v);
    }
    return index;
}

std::vector<Behavior> retrieve_for_question(const Handbook& handbook, const FlatIndex* index,
                                            Provider* embedder, const Question& q,
                                            RetrievalMode mode, int k) {
    if (handbook.empty()) return {};
    if (mode == RetrievalMode::topic) {
        if (!q.topic) {
            throw_invalid("question '" + q.id +
                          "' has no topic label; use embedding retrieval instead");
        }
        return handbook.by_topic(*q.topic);
    }
    if (k < 1) throw_invalid("retrieval k must be >= 1");
    if (!index || index->empty()) {
        throw_invalid("embedding retrieval needs a built index");
    }
    if (!embedder) throw_invalid("embedding retrieval needs an embedding provider");

    EmbeddingVector qv = embed_text(*embedder, q.text);
    std::vector<ScoredName> ranked = index->query(qv, static_cast<std::size_t>(k));
    std::vector<Behavior> out;
    out.reserve(ranked.size());
    for (const ScoredName& r : ranked) {
        const Behavior* b = handbook.find(r.name);
        if (!b) {
            throw_invalid("index entry '" + r.name + "' is missing from the handbook; "
                          "rebuild the index");
        }
        out.push_back(*b);
    }
    return out;
}

}  // namespace bhv
