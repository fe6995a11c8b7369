#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iontrap {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,   ///< validation or acceptance failure
  kExitUsage = 2,     ///< bad command line or config
  kExitCapacity = 3,  ///< memory cap exceeded
};

/// Entry point shared by the binary and the tests. `args` excludes argv[0].
///
///   iontrap run      --benchmark grover --sigma-theta pi/128 --seed 1 --out g.csv
///   iontrap sweep    --benchmark mult --dec 1e-7,1e-6,1e-5 --mode sparse
///   iontrap validate [--tables FILE]
///   iontrap info     [NAME | --circuit FILE]
///
/// `--config FILE` reads key=value lines using the long flag names; flags on
/// the command line win. IONTRAP_WORKERS sets the default worker count.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iontrap
