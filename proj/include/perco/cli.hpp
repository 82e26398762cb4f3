#pragma once

namespace perco {

// Entry point for the perco tool. Exit codes: 0 success, 2 invalid
// configuration or usage, 3 numerical failure, 4 oracle-check failure.
int cli_main(int argc, const char* const* argv);

}  // namespace perco
