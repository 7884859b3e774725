// lararp: single runs and experiment sweeps from the command line.

#include "lararp/experiment.hpp"
#include "lararp/scenario.hpp"
#include "lararp/simulator.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

using namespace lararp;

namespace
{

/// Writes text to path, or stdout when path is empty or "-".
void
WriteOutput(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
    {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw Error("cannot open output file '" + path + "'");
    }
    out << text;
}

int
RunSingle(const std::string& scenario,
          std::optional<std::uint64_t> seed,
          const std::string& output,
          const std::string& logPath,
          int verbosity)
{
    ScenarioConfig config = scenario.empty() ? ScenarioConfig{} : LoadScenario(scenario);
    if (seed)
    {
        config.seed = *seed;
    }
    RunResult result = RunScenario(config, !logPath.empty());
    if (verbosity > 0)
    {
        std::fprintf(stderr,
                     "sent=%llu delivered=%llu dropped=%llu lost=%llu in_flight=%llu control_tx=%llu\n",
                     static_cast<unsigned long long>(result.report.dataSent),
                     static_cast<unsigned long long>(result.report.dataDelivered),
                     static_cast<unsigned long long>(result.report.dataDropped),
                     static_cast<unsigned long long>(result.report.dataLost),
                     static_cast<unsigned long long>(result.report.dataInFlightEnd),
                     static_cast<unsigned long long>(result.report.ControlTx()));
    }
    if (!logPath.empty())
    {
        WriteOutput(logPath, result.log);
    }
    WriteOutput(output, RunCsvHeader() + "\n" + RunCsvRow(config, result.report) + "\n");
    return 0;
}

int
RunSweepCommand(const std::string& experiment,
                const std::string& scenario,
                std::vector<std::uint64_t> seeds,
                const std::string& output,
                unsigned jobs,
                int verbosity)
{
    const Experiment exp = ParseExperiment(experiment);
    ScenarioConfig base = scenario.empty() ? ScenarioConfig{} : LoadScenario(scenario);
    if (seeds.empty())
    {
        seeds = DefaultSeeds();
    }
    auto progress = [verbosity](std::size_t done, std::size_t total) {
        if (verbosity > 0)
        {
            std::fprintf(stderr, "\r%zu/%zu runs", done, total);
            if (done == total)
            {
                std::fprintf(stderr, "\n");
            }
        }
    };
    SweepResult result = RunSweep(exp, base, seeds, jobs, progress);
    WriteOutput(output, SweepCsv(result));
    return 0;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"LARARP routing simulator"};
    app.require_subcommand(1);

    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Print run summaries to stderr");

    auto* run = app.add_subcommand("run", "Run one scenario and print one CSV row");
    std::string runScenario;
    std::optional<std::uint64_t> runSeed;
    std::string runOutput;
    std::string runLog;
    run->add_option("-s,--scenario", runScenario, "Scenario file (key=value); defaults when omitted");
    run->add_option("--seed", runSeed, "Override the scenario seed");
    run->add_option("-o,--output", runOutput, "CSV output path (stdout by default)");
    run->add_option("--log", runLog, "Write the event log to this path");

    auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep for both protocols");
    std::string experiment;
    std::string sweepScenario;
    std::vector<std::uint64_t> seeds;
    std::string sweepOutput;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    sweep->add_option("-e,--experiment", experiment, "attackers or pausetime")->required();
    sweep->add_option("-s,--scenario", sweepScenario, "Base scenario file");
    sweep->add_option("--seeds", seeds, "Seeds (default 1 2 3 4 5)")->delimiter(',');
    sweep->add_option("-o,--output", sweepOutput, "CSV output path (stdout by default)");
    sweep->add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

    auto* keys = app.add_subcommand("defaults", "Print the default scenario in key=value form");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            return RunSingle(runScenario, runSeed, runOutput, runLog, verbosity);
        }
        if (*sweep)
        {
            return RunSweepCommand(experiment, sweepScenario, seeds, sweepOutput, jobs, verbosity);
        }
        if (*keys)
        {
            std::cout << FormatScenario(ScenarioConfig{});
            return 0;
        }
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "lararp: %s\n", e.what());
        return 1;
    }
    return 0;
}
