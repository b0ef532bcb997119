#pragma once

#include <stdexcept>
#include <string>

namespace bhv {

// Error categories map onto CLI exit codes: invalid_input -> 2,
// provider/io/parse failures -> 1 or 2 depending on whether the run
// produced a usable partial result.
enum class ErrorKind { invalid_input, parse, io, provider };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
    throw Error(ErrorKind::invalid_input, msg);
}
[[noreturn]] inline void throw_parse(const std::string& msg) {
    throw Error(ErrorKind::parse, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
    throw Error(ErrorKind::io, msg);
}
[[noreturn]] inline void throw_provider(const std::string& msg) {
    throw Error(ErrorKind::provider, msg);
}

}  // namespace bhv
