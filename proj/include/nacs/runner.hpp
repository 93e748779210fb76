#pragma once

#include <ostream>

#include "nacs/config.hpp"

namespace nacs {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitFailed = 2 };

/// Execute the configured pipeline and write its artifacts under
/// cfg.output:
///   solve   fields.csv, fields.bin, summary.txt
///   second  the above plus fields_second.csv, fields_second.bin
///   sweep   sweep.csv, summary.txt
///   verify  verify.txt (reads cfg.input, default output/fields.bin)
/// Progress and errors go to `log`. Failed solves keep their artifacts and
/// mark the summary with "unconverged = true".
int run(const RunConfig &cfg, std::ostream &log);

} // namespace nacs
