// Entry point of the `mao` command, callable in-process for tests.
#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mao::cli {

enum Exit : int { kOk = 0, kFindings = 1, kPipelineFailure = 2, kUsage = 3 };

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
EnvLookup process_env();

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env());

}  // namespace mao::cli
