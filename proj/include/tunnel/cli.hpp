#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tunnel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one tunnelsim subcommand. The one-line summary goes to `out`,
/// diagnostics and usage text to `err`. Returns 0 on success, 2 on a
/// configuration or usage error, 3 on a numerical failure.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, char** argv);

}  // namespace tunnel
