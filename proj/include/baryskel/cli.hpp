#ifndef BARYSKEL_CLI_HPP
#define BARYSKEL_CLI_HPP

#include <string>
#include <vector>

namespace baryskel {

/// Entry point for the command-line tool; also callable from tests.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);

} // namespace baryskel

#endif
