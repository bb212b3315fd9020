#ifndef QDYN_RUNNER_HPP
#define QDYN_RUNNER_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "qdyn/scenario.hpp"
#include "qdyn/types.hpp"

namespace qdyn::runner {

inline constexpr const char* tool_version = "0.1.0";

struct RunRecord {
    std::string scenario_hash;
    std::string experiment;
    std::string version;
    std::string started_utc;
    std::string finished_utc;
    std::filesystem::path directory;
    std::vector<std::string> files;   // relative to directory, all non-empty on success
    std::string summary_json;         // per-experiment measurements and pass/fail notes
    bool pass = false;
};

/// Execute the experiment named by the scenario, writing result CSVs and a
/// record.json into the output directory. Deterministic: identical
/// scenarios produce bitwise-identical result CSVs.
RunRecord run(const scenario::Scenario& sc, const std::filesystem::path& output_override = {});

/// Derive per-figure CSV files (under <directory>/figures) from a finished
/// run's result files; fails if a listed result file is missing.
std::vector<std::string> emit_plot_data(const RunRecord& record);

}  // namespace qdyn::runner

#endif
