#pragma once

#include <stdexcept>
#include <string>

namespace permap {

// Error categories surfaced through the C API as integer codes.
enum class ErrorCode : int {
    ok = 0,
    corpus_error = 1,
    canonicalization_error = 2,
    integrity_error = 3,
    load_error = 4,
    prompt_error = 5,
    provider_error = 6,
    config_error = 7,
    io_error = 8,
    oracle_error = 9,
    internal_error = 10,
};

class PermapError : public std::runtime_error {
public:
    PermapError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace permap
