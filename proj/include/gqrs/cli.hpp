#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gqrs::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Runs one subcommand (design, ingest, train, sample, gof, es-study).
/// args excludes the program name. Returns the process exit status; on
/// failure a single JSON error line is written to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace gqrs::cli
