#include "wheelftc/error.hpp"

#include <array>
#include <cmath>
#include <charconv>

namespace wheelftc {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Parse: return "E_PARSE";
        case ErrorCode::Range: return "E_RANGE";
        case ErrorCode::Overlap: return "E_OVERLAP";
        case ErrorCode::Profile: return "E_PROFILE";
        case ErrorCode::Numeric: return "E_NUMERIC";
        case ErrorCode::Degenerate: return "E_DEGENERATE";
        case ErrorCode::Io: return "E_IO";
    }
    return "E_UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

NumericError::NumericError(std::size_t row, const std::string& what)
    : Error(ErrorCode::Numeric, "non-finite state at row " + std::to_string(row) + " (" + what + ")"),
      row_(row) {}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    // plain notation for everyday magnitudes, so 0.0005 is not printed as 5e-04
    const double mag = std::abs(value);
    const bool plain = mag == 0.0 || (mag >= 1e-5 && mag < 1e15);
    auto [end, ec] = plain ? std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed)
                           : std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf.data(), end);
}

}  // namespace wheelftc
