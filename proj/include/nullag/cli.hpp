#ifndef NULLAG_CLI_HPP
#define NULLAG_CLI_HPP

#include <string>
#include <vector>

namespace nullag::cli {

/** Runs one toolkit command. argv follows main() conventions minus the
 *  program name. Returns 0 when every verdict matches its expectation,
 *  1 on unexpected verdicts, 2 on usage errors. */
int run(const std::vector<std::string>& argv);

}  // namespace nullag::cli

#endif
