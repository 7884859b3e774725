#pragma once

#include "lararp/metrics.hpp"
#include "lararp/scenario.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace lararp
{

enum class Experiment
{
    /// Misbehaving node count 5, 10, 15, 20, 25.
    Attackers,
    /// Pause time 10, 20, 30, 40, 50 s with 5 attackers.
    PauseTime,
};

const char* ExperimentName(Experiment experiment);
/// Accepts "attackers" and "pausetime". Throws ConfigError otherwise.
Experiment ParseExperiment(std::string_view name);

/// Sweep points of an experiment, ascending.
std::vector<double> SweepPoints(Experiment experiment);

/// Seeds used when none are given: 1..5.
std::vector<std::uint64_t> DefaultSeeds();

/// Column names of one run, shared by single-run and sweep output.
std::string RunCsvHeader();
std::string RunCsvRow(const ScenarioConfig& config, const MetricsReport& report);

struct SweepRun
{
    double x = 0.0;
    ScenarioConfig config;
    MetricsReport report;
};

struct SweepResult
{
    Experiment experiment = Experiment::Attackers;
    /// Points x protocols x seeds, in that nesting order.
    std::vector<SweepRun> runs;
};

/// Configs of a sweep in deterministic order: for each point, for each of
/// LARARP then the baseline, for each seed.
std::vector<SweepRun> PlanSweep(Experiment experiment,
                                const ScenarioConfig& base,
                                const std::vector<std::uint64_t>& seeds);

/// Runs every planned config, on up to `threads` workers. The result order
/// does not depend on completion order. A failing run aborts the sweep
/// with an Error naming the run. progress, when set, is called after each
/// completed run with (done, total); calls are serialized.
SweepResult RunSweep(Experiment experiment,
                     const ScenarioConfig& base,
                     const std::vector<std::uint64_t>& seeds,
                     unsigned threads = 1,
                     const std::function<void(std::size_t, std::size_t)>& progress = {});

/// Per-run rows (kind=run) followed by per point and protocol seed means
/// (kind=mean). Header:
/// kind,experiment,x,<RunCsvHeader columns>,runs
std::string SweepCsv(const SweepResult& result);

} // namespace lararp
