#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mdim {

using Symbol = std::uint16_t;

// Failure categories; the CLI maps them onto exit codes.
enum class ErrorKind { config, infeasible, certificate };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& code, const std::string& detail) {
    throw Error(kind, code, detail);
}

enum class Mode { exact, sampled };

inline const char* mode_name(Mode m) { return m == Mode::exact ? "exact" : "sampled"; }

}  // namespace mdim
