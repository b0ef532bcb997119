#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include <json.hpp>

namespace bhv {

// All file artifacts are serialized with ordered_json so key order (and
// therefore byte content) is reproducible across runs and platforms.
using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);

// Writes via temp file + rename in the target directory.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

// Calls fn(line_number, parsed) for every nonempty line; line numbers are
// 1-based. Parse failures raise a parse error naming the line.
void for_each_jsonl_line(const std::filesystem::path& path,
                         const std::function<void(int, const Json&)>& fn);

// One object per line, '\n' terminated.
std::string to_jsonl_line(const Json& j);

}  // namespace bhv
