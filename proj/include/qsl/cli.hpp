// cli.hpp
// Entry point of the `qsl` command-line tool.
//
// Exit status: 0 success, 1 domain failure, 2 usage error. Machine-readable
// output (JSON) goes to `out`, human-readable text to `err`.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsl {

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsl
