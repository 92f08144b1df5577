#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace qprep::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitBoundViolated = 1,
    kExitValidation = 2,
    kExitIo = 3,
    kExitInternal = 4,
};

int cmd_plan(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

// Writes report.json and amplitudes.csv into out_dir and a PASS/FAIL line to out.
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::ostream& out, std::ostream& err);

// Re-evaluates every check recorded in a report.json.
int cmd_verify(const std::filesystem::path& report_path, std::ostream& out, std::ostream& err);

// vary: "a=8..16" or "tprime=1..6".
int cmd_sweep(const std::filesystem::path& config_path, const std::string& vary,
              const std::filesystem::path& out_csv, std::ostream& out, std::ostream& err);

}  // namespace qprep::cli
