#pragma once

#include <iosfwd>

namespace pim {

// exit codes: 0 ok, 2 configuration error, 3 engine error
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace pim
