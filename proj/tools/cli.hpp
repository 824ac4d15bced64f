#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace mide::cli {

// Exit codes: 0 ok, 2 malformed CSV, 3 invalid input or configuration,
// 4 numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// key=value lines, '#' comments, dotted keys kept verbatim.
std::map<std::string, std::string> parse_config_text(const std::string& text);

}  // namespace mide::cli
