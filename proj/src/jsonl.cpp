#include "bhv/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "bhv/errors.hpp"

namespace bhv {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw_io("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw_io("short write: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw_io("rename failed for " + path.string() + ": " + ec.message());
}

void for_each_jsonl_line(const std::filesystem::path& path,
                         const std::function<void(int, const Json&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_io("cannot open file: " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw_parse(path.string() + ":" + std::to_string(line_no) + ": malformed JSON line");
        }
        fn(line_no, j);
    }
}

std::string to_jsonl_line(const Json& j) {
    return j.dump() + "\n";
}

}  // namespace bhv
