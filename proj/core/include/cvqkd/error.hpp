#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cvqkd {

enum class ErrorKind {
    domain,
    shape,
    calibration_invalid,
    degenerate_reference,
    sync_failure,
    empty_output,
    no_threshold,
    config,
    mode,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the runner in
// particular) can count per-block failures without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace cvqkd
