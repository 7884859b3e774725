#include "lararp/experiment.hpp"

#include "lararp/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace lararp
{

namespace
{

std::string
FormatNumber(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct MetricColumn
{
    const char* name;
    std::optional<double> (*get)(const MetricsReport&);
};

const std::vector<MetricColumn>&
MetricColumns()
{
    static const std::vector<MetricColumn> columns = {
        {"pdr", [](const MetricsReport& r) { return r.Pdr(); }},
        {"avg_delay", [](const MetricsReport& r) { return r.AvgDelay(); }},
        {"control_overhead", [](const MetricsReport& r) { return r.ControlOverhead(); }},
        {"data_sent", [](const MetricsReport& r) -> std::optional<double> { return double(r.dataSent); }},
        {"data_delivered", [](const MetricsReport& r) -> std::optional<double> { return double(r.dataDelivered); }},
        {"data_dropped", [](const MetricsReport& r) -> std::optional<double> { return double(r.dataDropped); }},
        {"data_lost", [](const MetricsReport& r) -> std::optional<double> { return double(r.dataLost); }},
        {"data_in_flight_end",
         [](const MetricsReport& r) -> std::optional<double> { return double(r.dataInFlightEnd); }},
        {"rreq_tx", [](const MetricsReport& r) -> std::optional<double> { return double(r.rreqTx); }},
        {"rrep_tx", [](const MetricsReport& r) -> std::optional<double> { return double(r.rrepTx); }},
        {"dest_hop_tag_checks",
         [](const MetricsReport& r) -> std::optional<double> { return double(r.destHopTagChecks); }},
        {"tag_checks", [](const MetricsReport& r) -> std::optional<double> { return double(r.tagChecks); }},
        {"security_rejections",
         [](const MetricsReport& r) -> std::optional<double> { return double(r.SecurityRejections()); }},
        {"detections", [](const MetricsReport& r) -> std::optional<double> { return double(r.detections); }},
    };
    return columns;
}

std::string
ConfigColumns(const ScenarioConfig& c, bool withSeed)
{
    std::string out;
    out += ProtocolName(c.protocol.protocol);
    out += ',';
    out += AttackName(c.attack.kind);
    out += ',';
    out += std::to_string(c.attackerCount);
    out += ',';
    out += FormatNumber(c.pauseTime);
    out += ',';
    out += withSeed ? std::to_string(c.seed) : std::string();
    out += ',';
    out += std::to_string(c.nodeCount);
    out += ',';
    out += FormatNumber(c.simTime);
    out += ',';
    out += c.protocol.fullVerification ? "true" : "false";
    return out;
}

} // namespace

const char*
ExperimentName(Experiment experiment)
{
    return experiment == Experiment::Attackers ? "attackers" : "pausetime";
}

Experiment
ParseExperiment(std::string_view name)
{
    if (name == "attackers")
    {
        return Experiment::Attackers;
    }
    if (name == "pausetime")
    {
        return Experiment::PauseTime;
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "' (expected attackers or pausetime)");
}

std::vector<double>
SweepPoints(Experiment experiment)
{
    if (experiment == Experiment::Attackers)
    {
        return {5, 10, 15, 20, 25};
    }
    return {10, 20, 30, 40, 50};
}

std::vector<std::uint64_t>
DefaultSeeds()
{
    return {1, 2, 3, 4, 5};
}

std::string
RunCsvHeader()
{
    std::string out = "protocol,attack,attackers,pause_time,seed,nodes,sim_time,full_verification";
    for (const auto& col : MetricColumns())
    {
        out += ',';
        out += col.name;
    }
    return out;
}

std::string
RunCsvRow(const ScenarioConfig& config, const MetricsReport& report)
{
    std::string out = ConfigColumns(config, true);
    for (const auto& col : MetricColumns())
    {
        out += ',';
        out += FormatMetric(col.get(report));
    }
    return out;
}

std::vector<SweepRun>
PlanSweep(Experiment experiment, const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds)
{
    if (seeds.empty())
    {
        throw ConfigError("sweep needs at least one seed");
    }
    std::vector<SweepRun> runs;
    for (double x : SweepPoints(experiment))
    {
        for (Protocol protocol : {Protocol::Lararp, Protocol::Saodv})
        {
            for (std::uint64_t seed : seeds)
            {
                SweepRun run;
                run.x = x;
                run.config = base;
                run.config.attackerIds.clear();
                if (experiment == Experiment::Attackers)
                {
                    run.config.attackerCount = static_cast<std::uint32_t>(x);
                }
                else
                {
                    run.config.attackerCount = 5;
                    run.config.pauseTime = x;
                }
                run.config.protocol.protocol = protocol;
                run.config.seed = seed;
                run.config.Validate();
                runs.push_back(std::move(run));
            }
        }
    }
    return runs;
}

SweepResult
RunSweep(Experiment experiment,
         const ScenarioConfig& base,
         const std::vector<std::uint64_t>& seeds,
         unsigned threads,
         const std::function<void(std::size_t, std::size_t)>& progress)
{
    SweepResult result;
    result.experiment = experiment;
    result.runs = PlanSweep(experiment, base, seeds);

    const std::size_t total = result.runs.size();
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mutex;
    std::size_t done = 0;
    std::string failure;

    auto worker = [&]() {
        while (!failed)
        {
            const std::size_t i = next++;
            if (i >= total)
            {
                return;
            }
            SweepRun& run = result.runs[i];
            try
            {
                run.report = RunScenario(run.config, false).report;
            }
            catch (const std::exception& e)
            {
                std::lock_guard lock(mutex);
                if (!failed)
                {
                    failed = true;
                    failure = std::string("sweep run ") + std::to_string(i) + " (x=" + FormatNumber(run.x) +
                              " protocol=" + ProtocolName(run.config.protocol.protocol) +
                              " seed=" + std::to_string(run.config.seed) + "): " + e.what();
                }
                return;
            }
            std::lock_guard lock(mutex);
            ++done;
            if (progress)
            {
                progress(done, total);
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
    if (workers == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t)
        {
            pool.emplace_back(worker);
        }
        for (auto& th : pool)
        {
            th.join();
        }
    }
    if (failed)
    {
        throw Error(failure);
    }
    return result;
}

std::string
SweepCsv(const SweepResult& result)
{
    const char* name = ExperimentName(result.experiment);
    std::string out = "kind,experiment,x," + RunCsvHeader() + ",runs\n";
    for (const SweepRun& run : result.runs)
    {
        out += "run,";
        out += name;
        out += ',';
        out += FormatNumber(run.x);
        out += ',';
        out += RunCsvRow(run.config, run.report);
        out += ",1\n";
    }

    // Seed means per (point, protocol); runs of a group are contiguous.
    std::size_t i = 0;
    while (i < result.runs.size())
    {
        std::size_t j = i;
        while (j < result.runs.size() && result.runs[j].x == result.runs[i].x &&
               result.runs[j].config.protocol.protocol == result.runs[i].config.protocol.protocol)
        {
            ++j;
        }
        out += "mean,";
        out += name;
        out += ',';
        out += FormatNumber(result.runs[i].x);
        out += ',';
        out += ConfigColumns(result.runs[i].config, false);
        for (const auto& col : MetricColumns())
        {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t k = i; k < j; ++k)
            {
                if (auto v = col.get(result.runs[k].report))
                {
                    sum += *v;
                    ++n;
                }
            }
            out += ',';
            out += n == 0 ? std::string() : FormatNumber(sum / static_cast<double>(n));
        }
        out += ',';
        out += std::to_string(j - i);
        out += '\n';
        i = j;
    }
    return out;
}

} // namespace lararp
