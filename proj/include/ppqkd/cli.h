#ifndef PPQKD_CLI_H
#define PPQKD_CLI_H

#include <iosfwd>

namespace ppqkd {

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitInvariantFailure = 2 };

/// Entry point of the `ppqkd` tool: run, replay, verify, sweep.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace ppqkd

#endif
