#pragma once

#include "lararp/adversary.hpp"
#include "lararp/event_log.hpp"
#include "lararp/metrics.hpp"
#include "lararp/mobility.hpp"
#include "lararp/protocol.hpp"
#include "lararp/scenario.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

namespace lararp
{

/// Serialization plus processing time of one hop.
double TransmissionDelay(std::size_t bytes, double bandwidth, double processing);

struct RunResult
{
    MetricsReport report;
    /// Empty when the run was executed without a log.
    std::string log;
    std::vector<FlowSpec> flows;
    std::vector<NodeId> attackers;
};

/**
 * \brief Discrete-event engine for one scenario.
 *
 * Events run in (time, ordinal) order; the ordinal is a counter assigned
 * at scheduling time, so the order is a pure function of the scenario.
 * Every random draw comes from streams forked off one generator seeded
 * with config.seed.
 */
class Simulator : public Environment
{
  public:
    /// Validates the config; throws ConfigError before anything runs.
    explicit Simulator(ScenarioConfig config, bool keepLog = true);

    /// Runs to config.simTime. Call once.
    RunResult Run();

    double Now() const
    {
        return m_now;
    }

    const ScenarioConfig& Config() const
    {
        return m_config;
    }

    const RoutingNode& Node(NodeId id) const
    {
        return m_nodes.at(id);
    }

    bool IsAttacker(NodeId id) const
    {
        return m_adversaries.at(id) != nullptr;
    }

    const std::vector<FlowSpec>& Flows() const
    {
        return m_flows;
    }

    const std::vector<NodeId>& Attackers() const
    {
        return m_attackerIds;
    }

    const MobilityState& Mobility() const
    {
        return m_mobility;
    }

    Vec2 Position(NodeId id) const;

    /// Nodes within radio range of node at the current instant, ascending.
    std::vector<NodeId> Neighbors(NodeId node) const;

    // Environment
    bool InRange(NodeId a, NodeId b) const override;
    const SharedKeyTable& SharedKeys() const override;
    std::span<const Digest> Publics(NodeId owner) const override;
    void PublishChain(NodeId owner, const KeyChain& chain) override;
    RequestId NewRequestId() override;
    Secret NewChainSeed() override;
    void OnCredit(NodeId self, NodeId neighbor, CreditEvent event, int value) override;
    void OnKeyRollover(NodeId self) override;

  private:
    struct Arrival
    {
        NodeId from;
        NodeId to;
        Message message;
    };

    struct DiscoveryTimer
    {
        NodeId node;
    };

    struct LegEnd
    {
        NodeId node;
    };

    struct CbrTick
    {
        std::uint32_t flow;
        std::uint32_t sequence;
    };

    struct WatchdogExpire
    {
        NodeId watcher;
        NodeId suspect;
        std::uint32_t flow;
        std::uint32_t sequence;
    };

    struct FloodTick
    {
        NodeId node;
    };

    struct Inject
    {
        NodeId node;
        Transmit transmit;
    };

    using Payload =
        std::variant<Arrival, DiscoveryTimer, LegEnd, CbrTick, WatchdogExpire, FloodTick, Inject>;

    struct Event
    {
        double time;
        std::uint64_t ordinal;
        Payload payload;
    };

    struct Later
    {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time != b.time ? a.time > b.time : a.ordinal > b.ordinal;
        }
    };

    /// What a node's honest handlers produced for one arrival.
    struct Outcome
    {
        std::optional<Transmit> transmit;
        /// The transmit relays the received message rather than answering it.
        bool relay = false;
    };

    void Schedule(double time, Payload payload);
    void Setup();

    void Dispatch(const Arrival& e);
    void Dispatch(const DiscoveryTimer& e);
    void Dispatch(const LegEnd& e);
    void Dispatch(const CbrTick& e);
    void Dispatch(const WatchdogExpire& e);
    void Dispatch(const FloodTick& e);
    void Dispatch(const Inject& e);

    Outcome Process(NodeId self, NodeId from, const Message& message);
    void Emit(NodeId sender, const Transmit& t);
    void SendData(NodeId source, DataPacket packet);
    void StartDiscovery(NodeId source, const Send<Rreq>& request);
    void ReportBroken(NodeId node, const DataPacket& packet, NodeId unreachable, RouteErrorCause cause);
    void LogDrop(NodeId node, const char* type, const Drop& drop);
    void DropData(NodeId node, const DataPacket& packet, DropReason reason);
    void Finish();

    ScenarioConfig m_config;
    EventLog m_log;
    Rng m_rng;
    Rng m_idRng;
    Rng m_seedRng;
    MobilityState m_mobility;
    std::vector<Rng> m_mobilityRng;
    SharedKeyTable m_keys;
    std::vector<std::vector<Digest>> m_publics;
    std::vector<RoutingNode> m_nodes;
    std::vector<std::unique_ptr<Adversary>> m_adversaries;
    std::vector<NodeId> m_attackerIds;
    std::vector<FlowSpec> m_flows;
    std::vector<double> m_flowStart;
    std::priority_queue<Event, std::vector<Event>, Later> m_queue;
    std::uint64_t m_ordinal = 0;
    double m_now = 0.0;
    bool m_ran = false;
    MetricsReport m_report;
};

/// Convenience wrapper: construct, run, return.
RunResult RunScenario(const ScenarioConfig& config, bool keepLog = true);

} // namespace lararp
