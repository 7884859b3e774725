#pragma once

#include "lararp/crypto.hpp"
#include "lararp/messages.hpp"
#include "lararp/types.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace lararp
{

enum class Protocol
{
    Lararp,
    /// Signature-everywhere comparison baseline: every node verifies every
    /// tag it can see, no trust table, no selective verification.
    Saodv,
};

const char* ProtocolName(Protocol protocol);
/// Accepts "lararp" and "saodv". Throws ConfigError otherwise.
Protocol ParseProtocol(std::string_view name);

struct ProtocolConfig
{
    Protocol protocol = Protocol::Lararp;
    /// C_t: a node is well behaving iff its credit is >= this value.
    int creditThreshold = 0;
    int initialCredit = 0;
    /// Credits removed per detected misbehaviour.
    int punishDelta = 2;
    /// Seconds without a route reply before discovery is restarted.
    double routeTimeout = 1.0;
    std::uint32_t retries = 2;
    /// Verify every hop tag at the destination, not only those of nodes
    /// below the credit threshold.
    bool fullVerification = false;
    /// Destination answers the first verified copy of a request from each
    /// neighbour instead of only the first copy overall.
    bool replyPerNeighbor = false;
    /// Apply the receive-credit rule to data packets as well as replies.
    bool creditDataPackets = true;
    /// Credit flooded route requests. Off: only packets relayed along a
    /// route (replies and data) earn credit.
    bool creditRouteRequests = true;
    /// Passive forwarding check on data packets handed to a neighbour.
    /// An extension; off by default.
    bool watchdog = false;
    double watchdogTimeout = 0.05;
    std::uint32_t chainLength = 64;
    std::size_t queueLimit = 64;
};

enum class CreditEvent
{
    Forwarded,
    Misbehaved,
};

/**
 * \brief Neighbor's trust counter table: neighbour id -> credit counter.
 *
 * Absent entries read as the initial credit.
 */
class NeighborTrustTable
{
  public:
    NeighborTrustTable(int initialCredit = 0, int punishDelta = 2)
        : m_initial(initialCredit),
          m_punish(punishDelta)
    {
    }

    int Credit(NodeId neighbor) const;

    /// Forwarded adds one, Misbehaved subtracts punishDelta. Returns the new value.
    int Update(NodeId neighbor, CreditEvent event);

    const std::map<NodeId, int>& Entries() const
    {
        return m_credit;
    }

    int InitialCredit() const
    {
        return m_initial;
    }

  private:
    int m_initial;
    int m_punish;
    std::map<NodeId, int> m_credit;
};

/// Why a handler refused a message. Names are stable; they appear in logs.
enum class DropReason : std::uint8_t
{
    Duplicate,
    BadVerifier,
    BadSourceMac,
    BadHopTag,
    ProhibitedNode,
    NotInRoute,
    NotNeighbor,
    BadDestTag,
    BadReverseTag,
    BadFirstHop,
    Replay,
    Stale,
    LinkBreak,
    NoRoute,
    Malformed,
    /// Source buffer overflow while waiting for a route.
    QueueFull,
    /// Deliberate drop by an attacker.
    Attack,
};

const char* ToString(DropReason reason);

/// Reasons that only a failed integrity, authenticity, freshness or trust
/// check produces. Topology-driven drops are excluded.
bool IsSecurityRejection(DropReason reason);

struct Drop
{
    DropReason reason;
    NodeId culprit = kNoNode;
};

/// A message to put on the air. cryptoOps counts hashes and tags computed
/// or verified while producing it; the simulator turns that into
/// processing time.
template <typename M>
struct Send
{
    M message;
    NodeId nextHop = kBroadcast;
    unsigned cryptoOps = 0;
};

struct Delivered
{
    DataPacket packet;
};

struct RouteEntry
{
    NodeId dest = 0;
    /// Intermediate nodes, source-adjacent first. Empty for a direct neighbour.
    std::vector<NodeId> nodes;
    double establishedAt = 0.0;
    bool valid = true;
};

struct RouteAccepted
{
    RouteEntry route;
    unsigned cryptoOps = 0;
};

struct RouteInvalidated
{
    NodeId dest;
};

struct PendingRequest
{
    RequestId requestId{};
    NodeId dest = 0;
    double sentAt = 0.0;
    double timeout = 1.0;
    std::uint32_t retriesRemaining = 0;
};

struct Rediscover
{
    Send<Rreq> request;
};

struct Unroutable
{
    NodeId dest;
    std::vector<DataPacket> dropped;
};

using TimerAction = std::variant<Rediscover, Unroutable>;

struct Queued
{
    std::optional<Send<Rreq>> discovery;
    /// Oldest packets pushed out of a full queue.
    std::vector<DataPacket> evicted;
};

struct NodeStats
{
    std::uint64_t revealChecks = 0;
    std::uint64_t tagChecks = 0;
    std::uint64_t tagComputations = 0;
    /// Hop-tag verifications performed while acting as a request's destination.
    std::uint64_t destHopTagChecks = 0;
    std::uint64_t keyRollovers = 0;
};

/**
 * \brief What a node may ask of the world it lives in.
 */
class Environment
{
  public:
    virtual ~Environment() = default;

    /// Radio reachability at the current instant.
    virtual bool InRange(NodeId a, NodeId b) const = 0;
    virtual const SharedKeyTable& SharedKeys() const = 0;
    /// Provisioned public verifiers of every chain a source has published,
    /// concatenated in publication order. Reveal indices are global.
    virtual std::span<const Digest> Publics(NodeId owner) const = 0;
    /// Out-of-band redistribution after a key rollover.
    virtual void PublishChain(NodeId owner, const KeyChain& chain) = 0;
    virtual RequestId NewRequestId() = 0;
    virtual Secret NewChainSeed() = 0;

    virtual void OnCredit(NodeId /*self*/, NodeId /*neighbor*/, CreditEvent /*event*/, int /*value*/)
    {
    }

    virtual void OnKeyRollover(NodeId /*self*/)
    {
    }
};

/**
 * \brief Routing state machine of one node.
 *
 * Handlers are synchronous and are driven by the simulator's event loop.
 * The same class runs the baseline when the config says Protocol::Saodv;
 * the differences are confined to the verification policy and the absence
 * of trust accounting.
 */
class RoutingNode
{
  public:
    RoutingNode(NodeId id, const ProtocolConfig& config, KeyChain chain);

    NodeId Id() const
    {
        return m_id;
    }

    const ProtocolConfig& Config() const
    {
        return m_config;
    }

    /// Starts discovery towards dest unless a valid route or a pending
    /// request already exists.
    std::optional<Send<Rreq>> InitiateRouteDiscovery(Environment& env, NodeId dest, double now);

    /// Builds and records a fresh request without the route/pending gates.
    /// Rolls the key chain over when it is exhausted.
    Send<Rreq> BuildRequest(Environment& env, NodeId dest);

    std::variant<Drop, Send<Rreq>> HandleRreq(Environment& env, Rreq rreq, NodeId prevHop);

    std::variant<Drop, Send<Rrep>> HandleRreqAtDestination(Environment& env,
                                                            const Rreq& rreq,
                                                            NodeId prevHop);

    std::variant<Drop, Send<Rrep>> HandleRrep(Environment& env, Rrep rrep, NodeId prevHop);

    std::variant<Drop, RouteAccepted> HandleRrepAtSource(Environment& env,
                                                         const Rrep& rrep,
                                                         NodeId prevHop,
                                                         double now);

    /// Retries or gives up on every pending request older than the timeout.
    std::vector<TimerAction> OnTimer(Environment& env, double now);

    /// Source side of a CBR send: transmit on a valid route or queue and
    /// start discovery.
    std::variant<Drop, Send<DataPacket>, Queued> OriginateData(Environment& env,
                                                               DataPacket packet,
                                                               double now);

    std::variant<Drop, Send<DataPacket>, Delivered> ForwardData(Environment& env,
                                                                DataPacket packet,
                                                                NodeId prevHop);

    /// Queued packets for dest, removed from the queue.
    std::vector<DataPacket> TakeQueued(NodeId dest);

    /// Reacts to a failed forward of packet towards unreachable. The source
    /// invalidates its own route; other nodes return an error to send upstream.
    std::optional<Send<RouteError>> ReportBrokenForward(const DataPacket& packet,
                                                        NodeId unreachable,
                                                        RouteErrorCause cause);

    std::variant<Drop, Send<RouteError>, RouteInvalidated> HandleRouteError(Environment& env,
                                                                            const RouteError& error,
                                                                            NodeId prevHop);

    // Watchdog: after handing a data packet to a neighbour that is not its
    // destination, expect to overhear the neighbour forward it.
    bool WantsWatch(const DataPacket& packet, NodeId nextHop) const;
    void Watch(const DataPacket& packet, NodeId suspect);
    void Overheard(NodeId sender, const DataPacket& packet);
    void ForgetWatch(NodeId suspect, std::uint32_t flowId, std::uint32_t sequence);
    /// Returns the packet when the suspect is still in range and never
    /// forwarded it; the suspect is punished.
    std::optional<DataPacket> WatchExpired(Environment& env,
                                           NodeId suspect,
                                           std::uint32_t flowId,
                                           std::uint32_t sequence);

    /// Trust test against the credit threshold. Always true for the baseline.
    bool Trusts(NodeId other) const;

    /// Applies the receive-credit rule for a packet from neighbor.
    void CreditReceipt(Environment& env, NodeId neighbor);
    int Punish(Environment& env, NodeId culprit);

    const NeighborTrustTable& Ntt() const
    {
        return m_ntt;
    }

    NeighborTrustTable& MutableNtt()
    {
        return m_ntt;
    }

    const RouteEntry* FindRoute(NodeId dest) const;

    const std::map<NodeId, PendingRequest>& Pending() const
    {
        return m_pending;
    }

    const NodeStats& Stats() const
    {
        return m_stats;
    }

    const KeyChain& Chain() const
    {
        return m_chain;
    }

    bool HasSeen(NodeId source, const RequestId& id) const
    {
        return m_seen.contains({source, id});
    }

    std::size_t QueuedCount() const;

  private:
    enum class RequestStatus
    {
        Pending,
        Superseded,
        Answered,
    };

    struct IssuedRequest
    {
        RequestId id;
        AuthTag tag;
        RequestStatus status;
        /// Destination tags of every verified reply received for it.
        std::set<AuthTag> replies;
    };

    using WatchKey = std::tuple<NodeId, std::uint32_t, std::uint32_t>;

    bool IsLararp() const
    {
        return m_config.protocol == Protocol::Lararp;
    }

    std::optional<NodeId> FirstDistrusted(std::span<const NodeId> nodes) const;
    bool CheckTag(const SymmetricKey& key, std::span<const std::uint8_t> msg, const AuthTag& tag);
    AuthTag MakeTag(const SymmetricKey& key, std::span<const std::uint8_t> msg);
    bool CheckReveal(const Rreq& rreq, Environment& env);

    NodeId m_id;
    ProtocolConfig m_config;
    KeyChain m_chain;
    /// Global index of m_chain's first element across key rollovers.
    std::uint32_t m_indexBase = 0;
    NeighborTrustTable m_ntt;
    std::map<NodeId, RouteEntry> m_routes;
    std::map<NodeId, PendingRequest> m_pending;
    std::map<NodeId, std::vector<IssuedRequest>> m_issued;
    std::set<std::pair<NodeId, RequestId>> m_seen;
    /// (source, request id, previous hop) answered as destination.
    std::set<std::tuple<NodeId, RequestId, NodeId>> m_answered;
    std::map<NodeId, std::deque<DataPacket>> m_queue;
    std::map<WatchKey, DataPacket> m_watch;
    NodeStats m_stats;
};

} // namespace lararp
