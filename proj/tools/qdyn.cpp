// Scenario-driven runner: parses a sectioned key-value config, executes the
// named experiment and writes plot-ready CSV results plus a JSON run record.
//
// Exit codes: 0 success, 1 validation failure, 2 runtime failure,
// 3 wrap-around monitor abort.

#include <cstdlib>
#include <future>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "qdyn/runner.hpp"
#include "qdyn/scenario.hpp"

namespace {

struct RunOutcome {
    int code = 0;
    std::string message;
};

RunOutcome run_one(const std::string& path, const std::string& output_dir, bool dry_run,
                   int verbosity) {
    auto parsed = qdyn::scenario::parse_scenario_file(path);
    if (!parsed.ok()) {
        std::string msg = path + ": validation failed\n";
        for (const auto& issue : parsed.issues) {
            msg += "  ";
            if (issue.line > 0)
                msg += "line " + std::to_string(issue.line) + ":" + std::to_string(issue.column) +
                       ": ";
            msg += issue.message + "\n";
        }
        return {1, msg};
    }
    if (dry_run) return {0, path + ": valid scenario (" +
                                std::string(qdyn::scenario::experiment_name(
                                    parsed.scenario->experiment)) +
                                ")\n"};
    try {
        auto record = qdyn::runner::run(*parsed.scenario, output_dir);
        auto figures = qdyn::runner::emit_plot_data(record);
        std::string msg;
        if (verbosity > 0) {
            msg += path + ": experiment " + record.experiment + " -> " +
                   record.directory.string() + "\n";
            for (const auto& f : record.files) msg += "  " + f + "\n";
            for (const auto& f : figures) msg += "  " + f + "\n";
            msg += "  summary:\n" + record.summary_json + "\n";
        } else {
            msg += path + ": " + record.experiment + (record.pass ? " [ok] " : " [check] ") +
                   record.directory.string() + "\n";
        }
        return {0, msg};
    } catch (const qdyn::MonitorAbort& ex) {
        return {3, path + ": monitor abort: " + ex.what() + "\n"};
    } catch (const std::exception& ex) {
        return {2, path + ": runtime failure: " + ex.what() + "\n"};
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-driven quantum dynamics and spectral workbench"};

    std::vector<std::string> configs;
    std::string output_dir;
    bool dry_run = false;
    int verbosity = 0;

    app.add_option("config", configs, "scenario file(s); multiple files run as a batch")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("-o,--output-dir", output_dir,
                   "override the output directory (env: QDYN_OUTPUT_DIR)");
    app.add_flag("-v,--verbose", verbosity, "verbose output");
    app.add_flag("--dry-run", dry_run, "validate the scenario and exit");

    CLI11_PARSE(app, argc, argv);

    unsigned threads = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("QDYN_THREADS"); env && *env)
        threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));

    int exit_code = 0;
    if (configs.size() == 1 || threads == 1 || dry_run) {
        for (const auto& path : configs) {
            RunOutcome r = run_one(path, output_dir, dry_run, verbosity);
            (r.code == 0 ? std::cout : std::cerr) << r.message;
            exit_code = std::max(exit_code, r.code);
        }
    } else {
        // batch mode: independent scenarios in parallel, each with its own
        // output directory
        std::vector<std::future<RunOutcome>> futures;
        for (const auto& path : configs)
            futures.push_back(std::async(std::launch::async, run_one, path, output_dir, dry_run,
                                         verbosity));
        for (auto& f : futures) {
            RunOutcome r = f.get();
            (r.code == 0 ? std::cout : std::cerr) << r.message;
            exit_code = std::max(exit_code, r.code);
        }
    }
    return exit_code;
}
