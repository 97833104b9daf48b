#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace wheelftc::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialBatch = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

struct RunArgs {
    std::filesystem::path scenario;
    std::filesystem::path output_dir = ".";
    std::optional<double> dt;
    std::optional<double> duration;
    std::optional<std::uint64_t> seed;
    bool diagnostics = false;
};

int run(const RunArgs& args, std::ostream& out, std::ostream& err);
int batch(const std::filesystem::path& dir, const std::filesystem::path& output_dir, int jobs, std::ostream& out,
          std::ostream& err);
int verify(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);
int report(const std::filesystem::path& telemetry, double fit_start, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace wheelftc::cli
