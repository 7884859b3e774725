#include "lararp/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace lararp
{

namespace
{

std::string
FormatDouble(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string_view
Trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double
ToDouble(std::string_view s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
    {
        throw ConfigError("expected a number, got '" + std::string(s) + "'");
    }
    return v;
}

template <typename T>
T
ToUnsigned(std::string_view s)
{
    T v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
    {
        throw ConfigError("expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
}

int
ToInt(std::string_view s)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
    {
        throw ConfigError("expected an integer, got '" + std::string(s) + "'");
    }
    return v;
}

bool
ToBool(std::string_view s)
{
    if (s == "true" || s == "1" || s == "on" || s == "yes")
    {
        return true;
    }
    if (s == "false" || s == "0" || s == "off" || s == "no")
    {
        return false;
    }
    throw ConfigError("expected a boolean, got '" + std::string(s) + "'");
}

std::vector<std::string_view>
Split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    if (Trim(s).empty())
    {
        return out;
    }
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        out.push_back(Trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
        {
            break;
        }
        start = pos + 1;
    }
    return out;
}

std::string
Join(const std::vector<std::string>& parts, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i)
    {
        if (i > 0)
        {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

struct KeySpec
{
    const char* name;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define LARARP_DOUBLE_KEY(key, member)                                                             \
    KeySpec                                                                                        \
    {                                                                                              \
        key, [](ScenarioConfig& c, std::string_view v) { c.member = ToDouble(v); },                \
            [](const ScenarioConfig& c) { return FormatDouble(c.member); }                         \
    }

#define LARARP_UINT_KEY(key, member, type)                                                         \
    KeySpec                                                                                        \
    {                                                                                              \
        key, [](ScenarioConfig& c, std::string_view v) { c.member = ToUnsigned<type>(v); },        \
            [](const ScenarioConfig& c) { return std::to_string(c.member); }                       \
    }

#define LARARP_INT_KEY(key, member)                                                                \
    KeySpec                                                                                        \
    {                                                                                              \
        key, [](ScenarioConfig& c, std::string_view v) { c.member = ToInt(v); },                   \
            [](const ScenarioConfig& c) { return std::to_string(c.member); }                       \
    }

#define LARARP_BOOL_KEY(key, member)                                                               \
    KeySpec                                                                                        \
    {                                                                                              \
        key, [](ScenarioConfig& c, std::string_view v) { c.member = ToBool(v); },                  \
            [](const ScenarioConfig& c) { return std::string(c.member ? "true" : "false"); }       \
    }

const std::vector<KeySpec>&
Keys()
{
    static const std::vector<KeySpec> keys = {
        LARARP_UINT_KEY("nodes", nodeCount, std::uint32_t),
        LARARP_DOUBLE_KEY("area_width", areaWidth),
        LARARP_DOUBLE_KEY("area_height", areaHeight),
        LARARP_DOUBLE_KEY("radio_range", radioRange),
        LARARP_DOUBLE_KEY("bandwidth", bandwidth),
        LARARP_DOUBLE_KEY("sim_time", simTime),
        LARARP_DOUBLE_KEY("speed_min", speedMin),
        LARARP_DOUBLE_KEY("speed_max", speedMax),
        LARARP_DOUBLE_KEY("pause_time", pauseTime),
        LARARP_UINT_KEY("packet_size", packetSize, std::uint32_t),
        LARARP_UINT_KEY("flow_count", flowCount, std::uint32_t),
        LARARP_DOUBLE_KEY("packet_rate", packetRate),
        KeySpec{"flow_start",
                [](ScenarioConfig& c, std::string_view v) {
                    if (v == "random")
                    {
                        c.flowStart.reset();
                    }
                    else
                    {
                        c.flowStart = ToDouble(v);
                    }
                },
                [](const ScenarioConfig& c) {
                    return c.flowStart ? FormatDouble(*c.flowStart) : std::string("random");
                }},
        LARARP_UINT_KEY("attackers", attackerCount, std::uint32_t),
        KeySpec{"attack",
                [](ScenarioConfig& c, std::string_view v) { c.attack.kind = ParseAttack(v); },
                [](const ScenarioConfig& c) { return std::string(AttackName(c.attack.kind)); }},
        LARARP_DOUBLE_KEY("attack_drop_probability", attack.dropProbability),
        KeySpec{"attack_tamper_field",
                [](ScenarioConfig& c, std::string_view v) { c.attack.tamperField = ParseTamperField(v); },
                [](const ScenarioConfig& c) {
                    return std::string(TamperFieldName(c.attack.tamperField));
                }},
        LARARP_UINT_KEY("attack_replay_buffer", attack.replayBuffer, std::size_t),
        LARARP_DOUBLE_KEY("attack_replay_delay", attack.replayDelay),
        LARARP_DOUBLE_KEY("attack_flood_rate", attack.floodRate),
        KeySpec{"protocol",
                [](ScenarioConfig& c, std::string_view v) { c.protocol.protocol = ParseProtocol(v); },
                [](const ScenarioConfig& c) {
                    return std::string(ProtocolName(c.protocol.protocol));
                }},
        LARARP_INT_KEY("credit_threshold", protocol.creditThreshold),
        LARARP_INT_KEY("initial_credit", protocol.initialCredit),
        LARARP_INT_KEY("punish_delta", protocol.punishDelta),
        LARARP_DOUBLE_KEY("route_timeout", protocol.routeTimeout),
        LARARP_UINT_KEY("route_retries", protocol.retries, std::uint32_t),
        LARARP_BOOL_KEY("full_verification", protocol.fullVerification),
        LARARP_BOOL_KEY("reply_per_neighbor", protocol.replyPerNeighbor),
        LARARP_BOOL_KEY("credit_data_packets", protocol.creditDataPackets),
        LARARP_BOOL_KEY("credit_route_requests", protocol.creditRouteRequests),
        LARARP_BOOL_KEY("watchdog", protocol.watchdog),
        LARARP_DOUBLE_KEY("watchdog_timeout", protocol.watchdogTimeout),
        LARARP_UINT_KEY("chain_length", protocol.chainLength, std::uint32_t),
        LARARP_UINT_KEY("queue_limit", protocol.queueLimit, std::size_t),
        LARARP_DOUBLE_KEY("processing_delay", processingDelay),
        LARARP_DOUBLE_KEY("crypto_delay", cryptoDelay),
        LARARP_UINT_KEY("seed", seed, std::uint64_t),
        KeySpec{"mobility",
                [](ScenarioConfig& c, std::string_view v) {
                    if (v == "random_waypoint")
                    {
                        c.mobility = MobilityKind::RandomWaypoint;
                    }
                    else if (v == "static")
                    {
                        c.mobility = MobilityKind::Static;
                    }
                    else
                    {
                        throw ConfigError("expected random_waypoint or static, got '" +
                                          std::string(v) + "'");
                    }
                },
                [](const ScenarioConfig& c) {
                    return std::string(c.mobility == MobilityKind::Static ? "static"
                                                                         : "random_waypoint");
                }},
        KeySpec{"positions",
                [](ScenarioConfig& c, std::string_view v) {
                    c.positions.clear();
                    for (auto item : Split(v, ';'))
                    {
                        auto xy = Split(item, ':');
                        if (xy.size() != 2)
                        {
                            throw ConfigError("expected x:y, got '" + std::string(item) + "'");
                        }
                        c.positions.push_back({ToDouble(xy[0]), ToDouble(xy[1])});
                    }
                },
                [](const ScenarioConfig& c) {
                    std::vector<std::string> parts;
                    for (const auto& p : c.positions)
                    {
                        parts.push_back(FormatDouble(p.x) + ":" + FormatDouble(p.y));
                    }
                    return Join(parts, ';');
                }},
        KeySpec{"flows",
                [](ScenarioConfig& c, std::string_view v) {
                    c.flows.clear();
                    for (auto item : Split(v, ';'))
                    {
                        auto sd = Split(item, '>');
                        if (sd.size() != 2)
                        {
                            throw ConfigError("expected source>dest, got '" + std::string(item) + "'");
                        }
                        c.flows.push_back({ToUnsigned<NodeId>(sd[0]), ToUnsigned<NodeId>(sd[1])});
                    }
                },
                [](const ScenarioConfig& c) {
                    std::vector<std::string> parts;
                    for (const auto& f : c.flows)
                    {
                        parts.push_back(std::to_string(f.source) + ">" + std::to_string(f.dest));
                    }
                    return Join(parts, ';');
                }},
        KeySpec{"attacker_ids",
                [](ScenarioConfig& c, std::string_view v) {
                    c.attackerIds.clear();
                    for (auto item : Split(v, ','))
                    {
                        c.attackerIds.push_back(ToUnsigned<NodeId>(item));
                    }
                },
                [](const ScenarioConfig& c) {
                    std::vector<std::string> parts;
                    for (NodeId id : c.attackerIds)
                    {
                        parts.push_back(std::to_string(id));
                    }
                    return Join(parts, ',');
                }},
    };
    return keys;
}

#undef LARARP_DOUBLE_KEY
#undef LARARP_UINT_KEY
#undef LARARP_INT_KEY
#undef LARARP_BOOL_KEY

void
Require(bool ok, const char* key, const std::string& what)
{
    if (!ok)
    {
        throw ConfigError(std::string(key) + ": " + what);
    }
}

} // namespace

void
ScenarioConfig::Validate() const
{
    Require(nodeCount >= 2, "nodes", "at least two nodes are required");
    Require(areaWidth > 0.0, "area_width", "must be positive");
    Require(areaHeight > 0.0, "area_height", "must be positive");
    Require(radioRange > 0.0, "radio_range", "must be positive");
    Require(bandwidth > 0.0, "bandwidth", "must be positive");
    Require(simTime > 0.0, "sim_time", "must be positive");
    Require(speedMin > 0.0, "speed_min", "must be positive");
    Require(speedMin <= speedMax, "speed_max", "must be >= speed_min");
    Require(pauseTime >= 0.0, "pause_time", "must be non-negative");
    Require(packetSize > 0, "packet_size", "must be positive");
    Require(packetRate > 0.0, "packet_rate", "must be positive");
    Require(!flowStart || *flowStart >= 0.0, "flow_start", "must be non-negative");
    Require(attackerCount < nodeCount, "attackers", "must be smaller than nodes");
    attack.Validate();
    Require(protocol.punishDelta >= 0, "punish_delta", "must be non-negative");
    Require(protocol.routeTimeout > 0.0, "route_timeout", "must be positive");
    Require(protocol.watchdogTimeout > 0.0, "watchdog_timeout", "must be positive");
    Require(protocol.chainLength >= 1, "chain_length", "must be at least 1");
    Require(protocol.queueLimit >= 1, "queue_limit", "must be at least 1");
    Require(processingDelay >= 0.0, "processing_delay", "must be non-negative");
    Require(cryptoDelay >= 0.0, "crypto_delay", "must be non-negative");

    if (!positions.empty())
    {
        Require(positions.size() == nodeCount, "positions", "needs exactly one entry per node");
        for (const auto& p : positions)
        {
            Require(p.x >= 0.0 && p.x <= areaWidth && p.y >= 0.0 && p.y <= areaHeight,
                    "positions",
                    "every position must lie inside the area");
        }
    }

    std::set<NodeId> attackers(attackerIds.begin(), attackerIds.end());
    if (!attackerIds.empty())
    {
        Require(attackers.size() == attackerIds.size(), "attacker_ids", "duplicate id");
        Require(*attackers.rbegin() < nodeCount, "attacker_ids", "id out of range");
        Require(attackerIds.size() == attackerCount, "attackers", "must equal the number of attacker_ids");
    }

    if (!flows.empty())
    {
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (const auto& f : flows)
        {
            Require(f.source < nodeCount && f.dest < nodeCount, "flows", "node id out of range");
            Require(f.source != f.dest, "flows", "source equals destination");
            Require(pairs.insert({f.source, f.dest}).second, "flows", "duplicate flow");
        }
    }
    else
    {
        const std::uint64_t honest = nodeCount - attackerCount;
        Require(honest * (honest - 1) >= flowCount,
                "flow_count",
                "more flows than distinct honest node pairs");
    }
}

ScenarioConfig
ParseScenario(std::string_view text)
{
    ScenarioConfig config;
    std::set<std::string, std::less<>> seenKeys;
    bool attackersGiven = false;
    std::size_t lineNo = 0;
    std::size_t start = 0;
    while (start <= text.size())
    {
        const auto end = text.find('\n', start);
        const std::string_view raw =
            text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++lineNo;

        const std::string_view line = Trim(raw);
        if (line.empty() || line.front() == '#')
        {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            throw ConfigError("line " + std::to_string(lineNo) + ": expected key=value");
        }
        const std::string key(Trim(line.substr(0, eq)));
        const std::string_view value = Trim(line.substr(eq + 1));
        const auto& keys = Keys();
        auto spec = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return key == k.name; });
        if (spec == keys.end())
        {
            throw ConfigError("line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
        }
        if (!seenKeys.insert(key).second)
        {
            throw ConfigError("line " + std::to_string(lineNo) + ": duplicate key '" + key + "'");
        }
        try
        {
            spec->set(config, value);
        }
        catch (const ConfigError& e)
        {
            throw ConfigError("line " + std::to_string(lineNo) + ": key '" + key + "': " + e.what());
        }
        attackersGiven = attackersGiven || key == "attackers";
    }
    if (!config.attackerIds.empty() && !attackersGiven)
    {
        config.attackerCount = static_cast<std::uint32_t>(config.attackerIds.size());
    }
    config.Validate();
    return config;
}

ScenarioConfig
LoadScenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return ParseScenario(buf.str());
}

std::string
FormatScenario(const ScenarioConfig& config)
{
    std::string out;
    for (const auto& k : Keys())
    {
        out += k.name;
        out += '=';
        out += k.get(config);
        out += '\n';
    }
    return out;
}

std::vector<std::string>
ScenarioKeys()
{
    std::vector<std::string> names;
    for (const auto& k : Keys())
    {
        names.emplace_back(k.name);
    }
    return names;
}

} // namespace lararp
