#pragma once

#include <ostream>

namespace curvedq {

/// Exit codes: 0 success, 1 validation failure, 2 configuration or usage
/// error, 3 any other error raised while running.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace curvedq
