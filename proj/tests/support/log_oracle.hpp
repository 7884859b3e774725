#pragma once

// Independent reader for the run trace. Shares no code with the library's
// own log parser so the two can be checked against each other.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oracle
{

struct Record
{
    double time = 0.0;
    /// Unset for "-".
    std::optional<std::uint32_t> node;
    std::string kind;
    std::map<std::string, std::string> fields;

    const std::string& Get(const std::string& key) const;
    double Number(const std::string& key) const;
    std::uint32_t Id(const std::string& key) const;
    /// Comma list, "-" is empty.
    std::vector<std::uint32_t> Ids(const std::string& key) const;
};

/// Throws std::runtime_error on a line that does not parse.
std::vector<Record> ParseLog(std::string_view text);

struct Tally
{
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t lost = 0;
    std::uint64_t inFlight = 0;
    double delaySum = 0.0;
    std::uint64_t rreqTx = 0;
    std::uint64_t rrepTx = 0;
    std::uint64_t rerrTx = 0;
    std::uint64_t dataTx = 0;
    std::uint64_t routeAccepts = 0;
    std::uint64_t detections = 0;
    /// Logged refusals keyed by reason, control and data together.
    std::map<std::string, std::uint64_t> reasons;
};

Tally Count(const std::vector<Record>& records);

struct Verdict
{
    std::size_t checked = 0;
    std::vector<std::string> problems;

    bool Ok() const
    {
        return problems.empty();
    }

    void Fail(std::string what);
    /// First few problems, one per line.
    std::string Summary() const;
};

/// Replays every credit record against initial + forwards - delta * misbehaved
/// and compares the closing ntt_final values.
Verdict CheckCreditLedger(const std::vector<Record>& records);

/// No node whose running credit is below the threshold appears in a route
/// accepted, issued or forwarded by the node holding that credit.
Verdict CheckProhibitedExclusion(const std::vector<Record>& records);

/// Every data_send has exactly one fate and every fate a matching send.
Verdict CheckConservation(const std::vector<Record>& records);

/// Leg endpoints inside the area, speeds inside bounds, durations equal to
/// distance / speed, and pauses between consecutive legs.
Verdict CheckLegs(const std::vector<Record>& records);

} // namespace oracle
