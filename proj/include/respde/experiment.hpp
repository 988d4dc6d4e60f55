#pragma once

#include <string>
#include <vector>

#include "respde/config.hpp"

namespace respde {

// Outcome of one CLI workflow. Exit codes are the test interface:
// 0 pass, 1 property violation, 2 invalid input (raised as exceptions
// before a result exists), 3 internal error (likewise).
struct CommandResult {
    int exit_code = 0;
    std::string message;
    std::vector<std::string> files;  // paths of everything written, manifest last
};

CommandResult cmd_simulate(const ExperimentConfig& cfg);
CommandResult cmd_converge(const ExperimentConfig& cfg);
CommandResult cmd_compare(const ExperimentConfig& cfg);
CommandResult cmd_verify(const ExperimentConfig& cfg);

// Hex-encoded SHA-256 of a byte string (the manifest hash).
std::string sha256_hex(const std::string& bytes);

}  // namespace respde
