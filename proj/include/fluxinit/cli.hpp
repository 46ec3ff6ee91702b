#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fluxinit {

inline const std::vector<std::string> kSubcommands = {
    "spectrum",        "matrix-elements", "find-resonance", "simulate-init",
    "error-map",       "leakage-removal", "steady-state",   "fit-crossing",
    "fit-decay",       "extract-spectrum", "metrology",     "synth"};

struct CliOptions {
    std::string command;
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

/// Runs one subcommand. Returns 0 on success; on failure writes a one-line JSON
/// error record to `err` and returns 2 for configuration errors, 1 otherwise.
int run(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// argv parsing plus run().
int cli_main(int argc, char** argv);

}  // namespace fluxinit
