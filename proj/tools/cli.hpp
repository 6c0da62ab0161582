#pragma once

#include <iosfwd>

namespace ensheat {

/// Entry point of the `ensheat` tool. Returns 0 on success, 1 on runtime
/// failure and 2 on usage or validation errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ensheat
