#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nrpb/config.hpp"
#include "nrpb/runner.hpp"

namespace nrpb {

struct ScenarioOptions {
    std::optional<int> dims;  ///< per-mode truncation override
    unsigned jobs = 0;
    ProgressCallback progress;
};

/// One emitted data set: the table plus its run manifest.
struct Output {
    std::string stem;
    Table table;
    Json manifest;
};

const std::vector<std::string>& scenario_names();

/// Throws UnknownScenario for names outside scenario_names().
std::vector<Output> run_scenario(const std::string& name, const ScenarioOptions& options = {});

/// Sweep plus manifest (parameters, truncation, residuals, wall time).
Output sweep_output(const std::string& stem, const SweepSpec& spec, unsigned jobs,
                    const ProgressCallback& progress = {});

enum class Format { Csv, Json, Both };

Format format_from_string(const std::string& name);

/// Writes <stem>.csv and/or <stem>.json plus <stem>.manifest.json into
/// `dir`. Returns the paths written.
std::vector<std::filesystem::path> write_output(const Output& output,
                                                const std::filesystem::path& dir,
                                                Format format = Format::Both);

} // namespace nrpb
