#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace fscap::cli {

/// Process exit codes shared by the subcommands.
enum ExitCode : int {
  kOk = 0,
  kInvalid = 1,        // validate: invalid channel; verify: rejected certificate
  kExhausted = 2,      // certify: search finished without a holding certificate
  kBudget = 3,         // value: certified target mode exceeded the budget
  kFailure = 4,        // I/O and parse failures
};

/// Runs one invocation. `args` excludes the program name; `env` stands in
/// for the process environment (FSCAP_WORKERS, FSCAP_BUDGET).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env = {});

}  // namespace fscap::cli
