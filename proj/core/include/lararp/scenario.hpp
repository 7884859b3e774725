#pragma once

#include "lararp/adversary.hpp"
#include "lararp/protocol.hpp"
#include "lararp/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lararp
{

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class MobilityKind
{
    RandomWaypoint,
    Static,
};

struct FlowSpec
{
    NodeId source = 0;
    NodeId dest = 0;

    friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

/**
 * \brief Every parameter of a run. Together with the seed it fully
 * determines the event log.
 */
struct ScenarioConfig
{
    std::uint32_t nodeCount = 100;
    double areaWidth = 1000.0;
    double areaHeight = 1000.0;
    double radioRange = 250.0;
    /// Channel rate in bits per second.
    double bandwidth = 2'000'000.0;
    double simTime = 50.0;
    double speedMin = 5.0;
    double speedMax = 10.0;
    double pauseTime = 10.0;
    std::uint32_t packetSize = 512;

    std::uint32_t flowCount = 10;
    /// CBR packets per second per flow.
    double packetRate = 4.0;
    /// Common start time of every flow; unset draws each start uniformly
    /// within the first send interval.
    std::optional<double> flowStart;

    std::uint32_t attackerCount = 0;
    AttackerProfile attack{AttackKind::BlackHole};

    ProtocolConfig protocol;

    /// Per-hop processing time of a forwarded message, seconds.
    double processingDelay = 0.001;
    /// Processing time per hash or tag operation, seconds.
    double cryptoDelay = 0.0002;

    std::uint64_t seed = 1;

    MobilityKind mobility = MobilityKind::RandomWaypoint;
    /// Explicit placement; size must equal nodeCount when set.
    std::vector<Vec2> positions;
    /// Explicit flows; replaces the random flow draw when set.
    std::vector<FlowSpec> flows;
    /// Explicit attacker ids; replaces the random draw when set.
    std::vector<NodeId> attackerIds;

    /// Throws ConfigError naming the offending key.
    void Validate() const;
};

/// Parses flat key=value text, one parameter per line. Blank lines and
/// lines starting with '#' are ignored. Unknown keys, duplicate keys and
/// bad values throw ConfigError naming the line number and key. Keys not
/// present keep their defaults. The result is validated.
ScenarioConfig ParseScenario(std::string_view text);

/// Reads and parses a scenario file.
ScenarioConfig LoadScenario(const std::string& path);

/// Canonical text form; ParseScenario(FormatScenario(c)) reproduces c.
std::string FormatScenario(const ScenarioConfig& config);

/// Every key ParseScenario accepts, in canonical order.
std::vector<std::string> ScenarioKeys();

} // namespace lararp
