#include "bhv/index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bhv/errors.hpp"
#include "bhv/jsonl.hpp"
#include "bhv/kernels.hpp"

namespace bhv {

namespace {

constexpr float kMinNorm = 1e-12f;

}  // namespace

std::string embedding_validation_error(const EmbeddingVector& v) {
    if (v.values.empty()) return "empty embedding";
    for (float x : v.values) {
        if (!std::isfinite(x)) return "non-finite embedding component";
    }
    if (simd::norm_f32(v.values.data(), v.values.size()) < kMinNorm) {
        return "degenerate embedding (norm too small to normalize)";
    }
    return {};
}

void FlatIndex::add(const std::string& name, const EmbeddingVector& v) {
    std::string err = embedding_validation_error(v);
    if (!err.empty()) throw_invalid("index add '" + name + "': " + err);
    if (dim_ == 0) {
        dim_ = v.dim();
    } else if (v.dim() != dim_) {
        throw_invalid("index add '" + name + "': dim " + std::to_string(v.dim()) +
                      " != index dim " + std::to_string(dim_));
    }
    float norm = simd::norm_f32(v.values.data(), v.values.size());
    names_.push_back(name);
    data_.reserve(data_.size() + dim_);
    for (float x : v.values) data_.push_back(x / norm);
}

EmbeddingVector FlatIndex::entry_vector(std::size_t i) const {
    EmbeddingVector v;
    v.values.assign(data_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                    data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
    return v;
}

std::vector<ScoredName> FlatIndex::query(const EmbeddingVector& q, std::size_t k) const {
    if (k == 0) throw_invalid("query k must be >= 1");
    if (empty()) return {};
    if (q.dim() != dim_) {
        throw_invalid("query dim " + std::to_string(q.dim()) + " != index dim " +
                      std::to_string(dim_));
    }
    std::string err = embedding_validation_error(q);
    if (!err.empty()) throw_invalid("query: " + err);

    float norm = simd::norm_f32(q.values.data(), q.values.size());
    std::vector<float> unit(dim_);
    for (std::size_t i = 0; i < dim_; ++i) unit[i] = q.values[i] / norm;

    std::vector<float> scores(size());
    simd::dot_batch_f32(unit.data(), data_.data(), size(), dim_, scores.data());

    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t take = std::min(k, size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take),
                      order.end(), [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });

    std::vector<ScoredName> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        float s = std::clamp(scores[order[i]], -1.0f, 1.0f);
        out.push_back({names_[order[i]], s});
    }
    return out;
}

void FlatIndex::save(const std::filesystem::path& path) const {
    std::string out;
    Json header;
    header["format"] = "flat-index";
    header["version"] = 1;
    header["dim"] = dim_;
    header["count"] = size();
    out += to_jsonl_line(header);
    for (std::size_t i = 0; i < size(); ++i) {
        Json j;
        j["name"] = names_[i];
        Json vec = Json::array();
        for (std::size_t d = 0; d < dim_; ++d) {
            // float -> double is exact, and shortest-round-trip printing
            // of that double parses back to the same float.
            vec.push_back(static_cast<double>(data_[i * dim_ + d]));
        }
        j["vector"] = std::move(vec);
        out += to_jsonl_line(j);
    }
    atomic_write_file(path, out);
}

FlatIndex FlatIndex::load(const std::filesystem::path& path) {
    FlatIndex idx;
    bool saw_header = false;
    std::size_t expected = 0;
    for_each_jsonl_line(path, [&](int line_no, const Json& j) {
        auto fail = [&](const std::string& msg) {
            throw_parse(path.string() + ":" + std::to_string(line_no) + ": " + msg);
        };
        if (!saw_header) {
            if (!j.is_object() || j.value("format", "") != "flat-index") {
                fail("expected flat-index header line");
            }
            idx.dim_ = j.value("dim", std::size_t{0});
            expected = j.value("count", std::size_t{0});
            if (idx.dim_ == 0 && expected > 0) fail("index header has dim 0");
            saw_header = true;
            return;
        }
        if (!j.is_object() || !j.contains("name") || !j.contains("vector") ||
            !j["vector"].is_array()) {
            fail("entry line needs name and vector");
        }
        if (j["vector"].size() != idx.dim_) {
            fail("vector length " + std::to_string(j["vector"].size()) +
                 " != dim " + std::to_string(idx.dim_));
        }
        idx.names_.push_back(j["name"].get<std::string>());
        for (const auto& x : j["vector"]) {
            idx.data_.push_back(static_cast<float>(x.get<double>()));
        }
        // Stored vectors must already be unit length.
        const float* row = idx.data_.data() + (idx.names_.size() - 1) * idx.dim_;
        float norm = simd::norm_f32(row, idx.dim_);
        if (std::abs(norm - 1.0f) > 1e-5f) {
            fail("entry '" + idx.names_.back() + "' is not unit-normalized");
        }
    });
    if (!saw_header) throw_parse(path.string() + ": missing flat-index header");
    if (idx.size() != expected) {
        throw_parse(path.string() + ": header count " + std::to_string(expected) +
                    " != entries " + std::to_string(idx.size()));
    }
    return idx;
}

}  // namespace bhv
