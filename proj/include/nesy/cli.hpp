#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nesy::cli {

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNumericalError = 2;

/// Command-line entry point. Writes one JSON document per query to `out`
/// and a single-line diagnostic to `err` on failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nesy::cli
