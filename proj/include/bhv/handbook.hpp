#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "bhv/behavior.hpp"

namespace bhv {

struct AppendReport {
    int inserted = 0;
    int renamed = 0;       // stored under a "__N" suffix after a name clash
    int deduplicated = 0;  // same name, same instruction: dropped
    int rejected = 0;
    std::vector<std::string> rejections;  // "name: reason" per rejected entry
};

// Append-only store of behaviors with unique names. Mutation is limited to
// append(); earlier entries never move or change. Reads are safe from any
// thread as long as appends are serialized by the caller.
class Handbook {
public:
    Handbook() = default;

    // Inserts a batch. Clashing names with identical instructions are
    // dropped (re-running curation is idempotent); clashes with different
    // instructions get the next free "__N" suffix so nothing is discarded.
    // Invalid entries are rejected individually. Bumps version once.
    AppendReport append(const std::vector<Behavior>& candidates);

    // All behaviors with this exact topic label, insertion order.
    std::vector<Behavior> by_topic(const std::string& topic) const;

    // All behaviors curated from this question, insertion order.
    std::vector<Behavior> by_source_question(const std::string& question_id) const;

    const Behavior* find(const std::string& name) const;

    const std::vector<Behavior>& behaviors() const { return behaviors_; }
    std::size_t size() const { return behaviors_.size(); }
    bool empty() const { return behaviors_.empty(); }
    std::uint64_t version() const { return version_; }

    bool operator==(const Handbook& other) const {
        return version_ == other.version_ && behaviors_ == other.behaviors_;
    }

    void save(const std::filesystem::path& path) const;
    static Handbook load(const std::filesystem::path& path);

private:
    std::vector<Behavior> behaviors_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::uint64_t version_ = 0;
};

}  // namespace bhv
