#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "porodarcy/config.hpp"

namespace porodarcy {

/// Runs one configured case, writing its outputs under `config.output_dir`
/// and the Newton histories to `log`.
void run_case(const RunConfig& config, std::ostream& log);

/// Entry point of the `porodarcy` tool. Returns 0 on success, 1 on a runtime
/// failure and 2 on a usage error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace porodarcy
