#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace bhv {

struct EmbeddingVector {
    std::vector<float> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

// Rejects empty, non-finite, or near-zero vectors (those cannot be
// normalized). Returns the validation error or empty string.
std::string embedding_validation_error(const EmbeddingVector& v);

struct ScoredName {
    std::string name;
    float score = 0.0f;

    bool operator==(const ScoredName&) const = default;
};

// Exact cosine search over unit-normalized vectors stored in insertion
// order. Immutable once built as far as queries are concerned: add() is
// only valid before the index is shared across threads.
class FlatIndex {
public:
    FlatIndex() = default;
    explicit FlatIndex(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::vector<std::string>& names() const { return names_; }

    // Normalizes and appends. Dim is fixed by the first entry.
    void add(const std::string& name, const EmbeddingVector& v);

    // Stored (already unit-normalized) vector of entry i.
    EmbeddingVector entry_vector(std::size_t i) const;

    // Top-k by cosine similarity, descending; ties broken by insertion
    // order (earlier first). Query is normalized internally, so results
    // are invariant under positive scaling of the query. Returns
    // min(k, size()) results with scores clamped to [-1, 1].
    std::vector<ScoredName> query(const EmbeddingVector& q, std::size_t k) const;

    // File format: header line {"format":"flat-index","version":1,
    // "dim":D,"count":N} then one {"name":…,"vector":[…]} per entry.
    // Floats round-trip exactly (shortest-representation JSON).
    void save(const std::filesystem::path& path) const;
    static FlatIndex load(const std::filesystem::path& path);

private:
    std::size_t dim_ = 0;
    std::vector<std::string> names_;
    std::vector<float> data_;  // row-major, size() * dim_
};

}  // namespace bhv
