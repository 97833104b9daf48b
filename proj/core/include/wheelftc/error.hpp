#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wheelftc {

enum class ErrorCode {
    Parse,       // malformed scenario document or telemetry file
    Range,       // value outside its admissible range
    Overlap,     // overlapping fault windows on one target/channel
    Profile,     // non-monotone knot sequence
    Numeric,     // non-finite simulation state
    Degenerate,  // envelope fit on a constant peak sequence
    Io,          // filesystem failure
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised by the engine when a state goes non-finite; carries the tick index.
class NumericError : public Error {
public:
    NumericError(std::size_t row, const std::string& what);

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Formats a double in shortest round-trip form.
std::string format_number(double value);

}  // namespace wheelftc
