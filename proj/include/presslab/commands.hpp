#pragma once

#include <string>
#include <vector>

#include "presslab/config.hpp"
#include "presslab/pressure.hpp"

namespace presslab {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitCheckFailed = 2, kExitInfeasible = 3, kExitParse = 4 };

struct CommandResult {
    int exit_code = kExitOk;
    std::string output;   // artifact text (CSV or JSON)
    std::string message;  // diagnostics for stderr
};

// estimate | verify | dimension | localent | sweep. Errors are mapped to exit codes, never thrown.
CommandResult run_command(const std::string& command, const RunConfig& cfg);

std::string csv_escape(const std::string& field);
std::string estimate_csv_header();
std::string estimate_csv_row(const PressureEstimate& e);

}  // namespace presslab
