#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tkp {

// All library failures carry a stable machine-readable code alongside the
// human-readable message. Codes in use:
//   IndexOutOfRange, ArityMismatch, ShapeMismatch, BadPermutation,
//   OrderMismatch, EmptyInput, NonFiniteInput, OrderTooLow, SizeOverflow,
//   BadShiftPattern, BadFile
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const char* code, const std::string& message) {
    throw Error(code, message);
}

} // namespace tkp
