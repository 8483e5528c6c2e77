// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>

#include "kglab/config.hpp"
#include "kglab/report.hpp"

namespace kglab {

enum ExitCode : int {
    kExitPass = 0,
    kExitCheckFailure = 1,
    kExitConfigError = 2,
    kExitBlowUp = 3,
    kExitBracketFailure = 4,
};

/// Report envelope shared by every subcommand.
struct CommandOutcome {
    nlohmann::json report;
    int exit_code = kExitPass;
};

nlohmann::json to_json(const Report& r);

CommandOutcome cmd_eigencheck(const RunConfig& cfg);
CommandOutcome cmd_fgr(const RunConfig& cfg);
CommandOutcome cmd_darboux(const RunConfig& cfg);
/// Writes trace.csv and checkpoint.csv into cfg.output_dir.
CommandOutcome cmd_evolve(const RunConfig& cfg);
/// Writes trace.csv and checkpoint.csv of the traced trajectory into cfg.output_dir.
CommandOutcome cmd_shoot(const RunConfig& cfg, unsigned threads);
CommandOutcome cmd_trace_check(const std::string& trace_path);

/// Worker count from KGLAB_THREADS (ConfigError when malformed), else the hardware count.
unsigned worker_threads();

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kglab
