#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdim/serialize.hpp"

namespace mdim {

struct ExperimentConfig {
    json raw;
    json alphabet_doc;
    int truncation = 20;
    json observable;  // {"kind": "valuation" | "constant" | "table", ...}
    std::uint64_t seed = 1;

    ShiftSystem system() const;
    Observable make_observable(const Alphabet& a) const;
    const json& block(const std::string& name) const;  // empty object when absent
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunContext {
    std::filesystem::path out = "out";
    unsigned workers = 1;
    Mode mode = Mode::exact;
};

// Each command writes its CSV and JSON artifacts under ctx.out and returns
// the JSON summary.
json cmd_space(const ExperimentConfig& cfg, const RunContext& ctx);
json cmd_mdim(const ExperimentConfig& cfg, const RunContext& ctx);
json cmd_irregular(const ExperimentConfig& cfg, const RunContext& ctx);
json cmd_report(const std::vector<std::filesystem::path>& runs, const RunContext& ctx);

int exit_code(ErrorKind k);

// Parses arguments, runs the verb, maps errors to exit codes.
int run_cli(int argc, char** argv);

}  // namespace mdim
