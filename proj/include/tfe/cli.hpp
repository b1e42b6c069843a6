// Command-line entry point: spectrum / molien / transform / simulate / rates /
// norms / experiment subcommands over the library, with config-file support.
#pragma once

#include <string>
#include <vector>

namespace tfe::cli {

// run the toolkit CLI on tokenized arguments (no program name); returns the
// process exit code
int run_cli(std::vector<std::string> args);

} // namespace tfe::cli
