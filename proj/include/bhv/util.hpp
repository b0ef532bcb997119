#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace bhv {

// FNV-1a, 64-bit. Stable across platforms; used for mock-script request
// matching and embedding-cache keys.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data);

std::string trim(std::string_view s);

// Collapses runs of internal whitespace to a single space.
std::string collapse_spaces(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

// Whitespace-delimited word count; the fallback token accounting used
// when a backend does not report usage.
int count_words(std::string_view text);

// Prefix of `text` through the end of the n-th word. Preserves the
// original bytes up to that point so truncation is reproducible.
std::string truncate_words(std::string_view text, int n_words);

// Runs fn(0..n-1) on up to `parallelism` worker threads. Callers store
// results by index, so output order never depends on scheduling. fn must
// not throw; wrap bodies that can fail and record the error per index.
void parallel_for(std::size_t n, int parallelism,
                  const std::function<void(std::size_t)>& fn);

}  // namespace bhv
