#include "lararp/protocol.hpp"

#include <algorithm>
#include <string>

namespace lararp
{

const char*
ProtocolName(Protocol protocol)
{
    return protocol == Protocol::Lararp ? "lararp" : "saodv";
}

Protocol
ParseProtocol(std::string_view name)
{
    if (name == "lararp")
    {
        return Protocol::Lararp;
    }
    if (name == "saodv")
    {
        return Protocol::Saodv;
    }
    throw ConfigError("unknown protocol '" + std::string(name) + "'");
}

int
NeighborTrustTable::Credit(NodeId neighbor) const
{
    auto it = m_credit.find(neighbor);
    return it == m_credit.end() ? m_initial : it->second;
}

int
NeighborTrustTable::Update(NodeId neighbor, CreditEvent event)
{
    auto [it, inserted] = m_credit.try_emplace(neighbor, m_initial);
    it->second += event == CreditEvent::Forwarded ? 1 : -m_punish;
    return it->second;
}

const char*
ToString(DropReason reason)
{
    switch (reason)
    {
    case DropReason::Duplicate:
        return "duplicate";
    case DropReason::BadVerifier:
        return "bad-verifier";
    case DropReason::BadSourceMac:
        return "bad-source-mac";
    case DropReason::BadHopTag:
        return "bad-hop-tag";
    case DropReason::ProhibitedNode:
        return "prohibited-node";
    case DropReason::NotInRoute:
        return "not-in-route";
    case DropReason::NotNeighbor:
        return "not-neighbor";
    case DropReason::BadDestTag:
        return "bad-dest-tag";
    case DropReason::BadReverseTag:
        return "bad-reverse-tag";
    case DropReason::BadFirstHop:
        return "bad-first-hop";
    case DropReason::Replay:
        return "replay";
    case DropReason::Stale:
        return "stale";
    case DropReason::LinkBreak:
        return "link-break";
    case DropReason::NoRoute:
        return "no-route";
    case DropReason::Malformed:
        return "malformed";
    case DropReason::QueueFull:
        return "queue-full";
    case DropReason::Attack:
        return "attack";
    }
    return "?";
}

bool
IsSecurityRejection(DropReason reason)
{
    switch (reason)
    {
    case DropReason::BadVerifier:
    case DropReason::BadSourceMac:
    case DropReason::BadHopTag:
    case DropReason::ProhibitedNode:
    case DropReason::NotInRoute:
    case DropReason::BadDestTag:
    case DropReason::BadReverseTag:
    case DropReason::Replay:
    case DropReason::Malformed:
        return true;
    default:
        return false;
    }
}

namespace
{

std::optional<std::size_t>
PositionOf(std::span<const NodeId> nodes, NodeId id)
{
    auto it = std::find(nodes.begin(), nodes.end(), id);
    if (it == nodes.end())
    {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - nodes.begin());
}

bool
KnownIds(std::span<const NodeId> ids, std::size_t nodeCount)
{
    return std::all_of(ids.begin(), ids.end(), [nodeCount](NodeId id) { return id < nodeCount; });
}

/// Structural invariants plus every id naming a provisioned node.
template <typename M>
bool
WellFormed(const M& message, std::size_t nodeCount)
{
    try
    {
        Validate(message);
    }
    catch (const EncodingError&)
    {
        return false;
    }
    if constexpr (std::is_same_v<M, Rreq>)
    {
        return message.source < nodeCount && message.dest < nodeCount && KnownIds(message.nodeList, nodeCount);
    }
    else if constexpr (std::is_same_v<M, Rrep>)
    {
        return message.source < nodeCount && message.dest < nodeCount && KnownIds(message.route, nodeCount);
    }
    else if constexpr (std::is_same_v<M, DataPacket>)
    {
        return message.source < nodeCount && message.dest < nodeCount && KnownIds(message.route, nodeCount);
    }
    else
    {
        return message.origin < nodeCount && message.dest < nodeCount && message.reporter < nodeCount &&
               message.unreachable < nodeCount && KnownIds(message.route, nodeCount);
    }
}

} // namespace

RoutingNode::RoutingNode(NodeId id, const ProtocolConfig& config, KeyChain chain)
    : m_id(id),
      m_config(config),
      m_chain(std::move(chain)),
      m_ntt(config.initialCredit, config.punishDelta)
{
}

bool
RoutingNode::Trusts(NodeId other) const
{
    return !IsLararp() || m_ntt.Credit(other) >= m_config.creditThreshold;
}

std::optional<NodeId>
RoutingNode::FirstDistrusted(std::span<const NodeId> nodes) const
{
    if (!IsLararp())
    {
        return std::nullopt;
    }
    for (NodeId n : nodes)
    {
        if (!Trusts(n))
        {
            return n;
        }
    }
    return std::nullopt;
}

void
RoutingNode::CreditReceipt(Environment& env, NodeId neighbor)
{
    if (!IsLararp())
    {
        return;
    }
    const int value = m_ntt.Update(neighbor, CreditEvent::Forwarded);
    env.OnCredit(m_id, neighbor, CreditEvent::Forwarded, value);
}

int
RoutingNode::Punish(Environment& env, NodeId culprit)
{
    if (!IsLararp())
    {
        return 0;
    }
    const int value = m_ntt.Update(culprit, CreditEvent::Misbehaved);
    env.OnCredit(m_id, culprit, CreditEvent::Misbehaved, value);
    return value;
}

bool
RoutingNode::CheckTag(const SymmetricKey& key,
                      std::span<const std::uint8_t> msg,
                      const AuthTag& tag)
{
    ++m_stats.tagChecks;
    return VerifyTag(key, msg, tag);
}

AuthTag
RoutingNode::MakeTag(const SymmetricKey& key, std::span<const std::uint8_t> msg)
{
    ++m_stats.tagComputations;
    return ComputeTag(key, msg);
}

bool
RoutingNode::CheckReveal(const Rreq& rreq, Environment& env)
{
    ++m_stats.revealChecks;
    return VerifyReveal(env.Publics(rreq.source), rreq.verifier.index, rreq.verifier.secret);
}

const RouteEntry*
RoutingNode::FindRoute(NodeId dest) const
{
    auto it = m_routes.find(dest);
    return it == m_routes.end() ? nullptr : &it->second;
}

std::size_t
RoutingNode::QueuedCount() const
{
    std::size_t n = 0;
    for (const auto& [dest, q] : m_queue)
    {
        n += q.size();
    }
    return n;
}

Send<Rreq>
RoutingNode::BuildRequest(Environment& env, NodeId dest)
{
    if (dest == m_id)
    {
        throw InvalidParameter("BuildRequest: destination equals source");
    }
    if (m_chain.Exhausted())
    {
        m_indexBase += static_cast<std::uint32_t>(m_chain.Length());
        m_chain = KeyChain::Generate(m_id, env.NewChainSeed(), m_config.chainLength);
        env.PublishChain(m_id, m_chain);
        ++m_stats.keyRollovers;
        env.OnKeyRollover(m_id);
    }
    Send<Rreq> out;
    Rreq& rreq = out.message;
    rreq.source = m_id;
    rreq.dest = dest;
    rreq.requestId = env.NewRequestId();
    rreq.sourceTag = MakeTag(env.SharedKeys().Key(m_id, dest), rreq.requestId);
    rreq.verifier = m_chain.RevealNext();
    rreq.verifier.index += m_indexBase;
    out.cryptoOps = 1;
    m_seen.insert({m_id, rreq.requestId});
    m_issued[dest].push_back({rreq.requestId, rreq.sourceTag, RequestStatus::Pending, {}});
    return out;
}

std::optional<Send<Rreq>>
RoutingNode::InitiateRouteDiscovery(Environment& env, NodeId dest, double now)
{
    if (const RouteEntry* route = FindRoute(dest); route != nullptr && route->valid)
    {
        return std::nullopt;
    }
    if (m_pending.contains(dest))
    {
        return std::nullopt;
    }
    Send<Rreq> out = BuildRequest(env, dest);
    m_pending[dest] = PendingRequest{out.message.requestId,
                                     dest,
                                     now,
                                     m_config.routeTimeout,
                                     m_config.retries};
    return out;
}

std::variant<Drop, Send<Rreq>>
RoutingNode::HandleRreq(Environment& env, Rreq rreq, NodeId prevHop)
{
    if (rreq.source == m_id || HasSeen(rreq.source, rreq.requestId))
    {
        return Drop{DropReason::Duplicate};
    }
    const std::size_t nodeCount = env.SharedKeys().NodeCount();
    if (!WellFormed(rreq, nodeCount) || rreq.nodeList.size() >= nodeCount || PositionOf(rreq.nodeList, m_id))
    {
        return Drop{DropReason::Malformed, prevHop};
    }
    const NodeId expectedSender = rreq.nodeList.empty() ? rreq.source : rreq.nodeList.back();
    if (prevHop != expectedSender)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    if (!Trusts(prevHop))
    {
        return Drop{DropReason::ProhibitedNode, prevHop};
    }
    if (auto bad = FirstDistrusted(rreq.nodeList))
    {
        return Drop{DropReason::ProhibitedNode, *bad};
    }

    unsigned ops = 1;
    if (!CheckReveal(rreq, env))
    {
        return Drop{DropReason::BadVerifier, prevHop};
    }

    if (!IsLararp())
    {
        // Baseline: verify everything visible on the request at every hop.
        const auto& keys = env.SharedKeys();
        ++ops;
        if (!CheckTag(keys.Key(rreq.source, rreq.dest), rreq.requestId, rreq.sourceTag))
        {
            return Drop{DropReason::BadSourceMac, prevHop};
        }
        for (std::size_t k = 0; k < rreq.nodeList.size(); ++k)
        {
            ++ops;
            if (!CheckTag(keys.Key(rreq.nodeList[k], rreq.dest), HopDigest(rreq, k), rreq.hopTags[k]))
            {
                return Drop{DropReason::BadHopTag, rreq.nodeList[k]};
            }
        }
    }

    if (m_config.creditRouteRequests)
    {
        CreditReceipt(env, prevHop);
    }
    rreq.nodeList.push_back(m_id);
    rreq.hopTags.push_back(MakeTag(env.SharedKeys().Key(m_id, rreq.dest),
                                   HopDigest(rreq, rreq.nodeList.size() - 1)));
    ++ops;
    m_seen.insert({rreq.source, rreq.requestId});
    return Send<Rreq>{std::move(rreq), kBroadcast, ops};
}

std::variant<Drop, Send<Rrep>>
RoutingNode::HandleRreqAtDestination(Environment& env, const Rreq& rreq, NodeId prevHop)
{
    if (rreq.dest != m_id)
    {
        throw InvalidParameter("HandleRreqAtDestination: request is not addressed to this node");
    }
    if (!WellFormed(rreq, env.SharedKeys().NodeCount()))
    {
        return Drop{DropReason::Malformed, prevHop};
    }
    if (m_config.replyPerNeighbor ? m_answered.contains({rreq.source, rreq.requestId, prevHop})
                                  : HasSeen(rreq.source, rreq.requestId))
    {
        return Drop{DropReason::Duplicate};
    }
    const NodeId expectedSender = rreq.nodeList.empty() ? rreq.source : rreq.nodeList.back();
    if (prevHop != expectedSender)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    if (!Trusts(prevHop))
    {
        return Drop{DropReason::ProhibitedNode, prevHop};
    }

    const auto& keys = env.SharedKeys();
    unsigned ops = 2;
    if (!CheckReveal(rreq, env))
    {
        return Drop{DropReason::BadVerifier, prevHop};
    }
    if (!CheckTag(keys.Key(rreq.source, m_id), rreq.requestId, rreq.sourceTag))
    {
        return Drop{DropReason::BadSourceMac, prevHop};
    }

    // Credit-gated hop verification: only nodes below the threshold are
    // checked unless full verification is on (always on for the baseline).
    for (std::size_t k = 0; k < rreq.nodeList.size(); ++k)
    {
        const NodeId hop = rreq.nodeList[k];
        const bool trusted = Trusts(hop);
        const bool check = !IsLararp() || m_config.fullVerification || !trusted;
        if (check)
        {
            ++ops;
            ++m_stats.destHopTagChecks;
            if (!CheckTag(keys.Key(hop, m_id), HopDigest(rreq, k), rreq.hopTags[k]))
            {
                Punish(env, hop);
                return Drop{DropReason::BadHopTag, hop};
            }
        }
        if (!trusted)
        {
            return Drop{DropReason::ProhibitedNode, hop};
        }
    }

    if (m_config.creditRouteRequests)
    {
        CreditReceipt(env, prevHop);
    }
    m_seen.insert({rreq.source, rreq.requestId});
    m_answered.insert({rreq.source, rreq.requestId, prevHop});

    Send<Rrep> out;
    Rrep& rrep = out.message;
    rrep.source = rreq.source;
    rrep.dest = m_id;
    const SymmetricKey& endToEnd = keys.Key(rreq.source, m_id);
    rrep.requestIdTag = MakeTag(endToEnd, rreq.requestId);
    rrep.route = rreq.nodeList;
    const Bytes body = RrepBody(rrep);
    rrep.destTag = MakeTag(endToEnd, body);
    rrep.routeTags.reserve(rrep.route.size());
    for (NodeId hop : rrep.route)
    {
        rrep.routeTags.push_back(MakeTag(keys.Key(hop, m_id), body));
    }
    ops += 2 + static_cast<unsigned>(rrep.route.size());
    out.nextHop = rrep.route.empty() ? rrep.source : rrep.route.back();
    out.cryptoOps = ops;
    return out;
}

std::variant<Drop, Send<Rrep>>
RoutingNode::HandleRrep(Environment& env, Rrep rrep, NodeId prevHop)
{
    if (!WellFormed(rrep, env.SharedKeys().NodeCount()))
    {
        return Drop{DropReason::Malformed, prevHop};
    }
    const auto pos = PositionOf(rrep.route, m_id);
    if (!pos)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    const std::size_t last = rrep.route.size() - 1;
    const NodeId upstream = *pos == 0 ? rrep.source : rrep.route[*pos - 1];
    const NodeId downstream = *pos == last ? rrep.dest : rrep.route[*pos + 1];
    if (prevHop != downstream)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    if (rrep.reverseHopTags.size() != last - *pos)
    {
        return Drop{DropReason::Malformed, prevHop};
    }
    if (!env.InRange(m_id, upstream) || !env.InRange(m_id, downstream))
    {
        return Drop{DropReason::NotNeighbor, env.InRange(m_id, upstream) ? downstream : upstream};
    }
    if (auto bad = FirstDistrusted(rrep.route))
    {
        return Drop{DropReason::ProhibitedNode, *bad};
    }

    const auto& keys = env.SharedKeys();
    const Bytes body = RrepBody(rrep);
    unsigned ops = 1;
    if (!CheckTag(keys.Key(m_id, rrep.dest), body, rrep.routeTags[*pos]))
    {
        return Drop{DropReason::BadDestTag, prevHop};
    }
    if (!IsLararp())
    {
        ++ops;
        if (!CheckTag(keys.Key(rrep.source, rrep.dest), body, rrep.destTag))
        {
            return Drop{DropReason::BadDestTag, prevHop};
        }
        for (std::size_t j = 0; j < rrep.reverseHopTags.size(); ++j)
        {
            const NodeId signer = rrep.route[last - j];
            ++ops;
            if (!CheckTag(keys.Key(signer, rrep.source), ReverseDigest(rrep, signer), rrep.reverseHopTags[j]))
            {
                return Drop{DropReason::BadReverseTag, signer};
            }
        }
    }

    CreditReceipt(env, prevHop);
    rrep.reverseHopTags.push_back(MakeTag(keys.Key(m_id, rrep.source), ReverseDigest(rrep, m_id)));
    ++ops;
    return Send<Rrep>{std::move(rrep), upstream, ops};
}

std::variant<Drop, RouteAccepted>
RoutingNode::HandleRrepAtSource(Environment& env, const Rrep& rrep, NodeId prevHop, double now)
{
    if (rrep.source != m_id)
    {
        throw InvalidParameter("HandleRrepAtSource: reply is not addressed to this node");
    }
    if (!WellFormed(rrep, env.SharedKeys().NodeCount()))
    {
        return Drop{DropReason::Malformed, prevHop};
    }
    const NodeId firstHop = rrep.route.empty() ? rrep.dest : rrep.route.front();
    if (prevHop != firstHop)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    if (!env.InRange(m_id, firstHop))
    {
        return Drop{DropReason::BadFirstHop, firstHop};
    }
    if (auto bad = FirstDistrusted(rrep.route))
    {
        return Drop{DropReason::ProhibitedNode, *bad};
    }
    if (rrep.reverseHopTags.size() != rrep.route.size())
    {
        return Drop{DropReason::Malformed, prevHop};
    }

    const auto& keys = env.SharedKeys();
    const SymmetricKey& endToEnd = keys.Key(m_id, rrep.dest);
    unsigned ops = 1;

    // Freshness: the reply must echo the tag of a request this node issued.
    auto& issued = m_issued[rrep.dest];
    // The destination's tag over the request id equals the source tag
    // recorded at issue time, so a comparison replaces recomputation.
    auto known = std::find_if(issued.begin(), issued.end(), [&](const IssuedRequest& r) {
        return r.tag == rrep.requestIdTag;
    });
    if (known == issued.end())
    {
        const bool pending = m_pending.contains(rrep.dest);
        return Drop{pending ? DropReason::BadSourceMac : DropReason::Replay, prevHop};
    }
    if (known->replies.contains(rrep.destTag))
    {
        return Drop{DropReason::Replay, prevHop};
    }

    const Bytes body = RrepBody(rrep);
    ++ops;
    if (!CheckTag(endToEnd, body, rrep.destTag))
    {
        return Drop{DropReason::BadDestTag, prevHop};
    }
    const std::size_t last = rrep.route.empty() ? 0 : rrep.route.size() - 1;
    for (std::size_t j = 0; j < rrep.reverseHopTags.size(); ++j)
    {
        const NodeId signer = rrep.route[last - j];
        ++ops;
        if (!CheckTag(keys.Key(signer, m_id), ReverseDigest(rrep, signer), rrep.reverseHopTags[j]))
        {
            Punish(env, signer);
            return Drop{DropReason::BadReverseTag, signer};
        }
    }

    CreditReceipt(env, prevHop);
    known->replies.insert(rrep.destTag);
    if (known->status != RequestStatus::Pending)
    {
        // Genuine reply to a request already answered or given up on.
        return Drop{DropReason::Stale};
    }
    const RequestId answered = known->id;
    for (auto& r : issued)
    {
        if (r.status == RequestStatus::Pending)
        {
            r.status = r.id == answered ? RequestStatus::Answered : RequestStatus::Superseded;
        }
    }
    m_pending.erase(rrep.dest);
    RouteEntry entry{rrep.dest, rrep.route, now, true};
    m_routes[rrep.dest] = entry;
    return RouteAccepted{std::move(entry), ops};
}

std::vector<TimerAction>
RoutingNode::OnTimer(Environment& env, double now)
{
    std::vector<TimerAction> actions;
    for (auto it = m_pending.begin(); it != m_pending.end();)
    {
        PendingRequest& p = it->second;
        if (now < p.sentAt + p.timeout)
        {
            ++it;
            continue;
        }
        const NodeId dest = p.dest;
        for (auto& r : m_issued[dest])
        {
            if (r.status == RequestStatus::Pending)
            {
                r.status = RequestStatus::Superseded;
            }
        }
        if (p.retriesRemaining > 0)
        {
            const std::uint32_t left = p.retriesRemaining - 1;
            Send<Rreq> request = BuildRequest(env, dest);
            p = PendingRequest{request.message.requestId, dest, now, m_config.routeTimeout, left};
            actions.emplace_back(Rediscover{std::move(request)});
            ++it;
        }
        else
        {
            it = m_pending.erase(it);
            Unroutable gaveUp{dest, {}};
            auto q = m_queue.find(dest);
            if (q != m_queue.end())
            {
                gaveUp.dropped.assign(q->second.begin(), q->second.end());
                m_queue.erase(q);
            }
            actions.emplace_back(std::move(gaveUp));
        }
    }
    return actions;
}

std::variant<Drop, Send<DataPacket>, Queued>
RoutingNode::OriginateData(Environment& env, DataPacket packet, double now)
{
    if (auto it = m_routes.find(packet.dest); it != m_routes.end() && it->second.valid)
    {
        const RouteEntry& route = it->second;
        const NodeId first = route.nodes.empty() ? packet.dest : route.nodes.front();
        if (env.InRange(m_id, first) && !FirstDistrusted(route.nodes) && Trusts(first))
        {
            packet.route = route.nodes;
            return Send<DataPacket>{std::move(packet), first, 0};
        }
        it->second.valid = false;
    }
    Queued queued;
    auto& q = m_queue[packet.dest];
    const NodeId dest = packet.dest;
    q.push_back(std::move(packet));
    while (q.size() > m_config.queueLimit)
    {
        queued.evicted.push_back(std::move(q.front()));
        q.pop_front();
    }
    queued.discovery = InitiateRouteDiscovery(env, dest, now);
    return queued;
}

std::vector<DataPacket>
RoutingNode::TakeQueued(NodeId dest)
{
    std::vector<DataPacket> out;
    auto it = m_queue.find(dest);
    if (it != m_queue.end())
    {
        out.assign(std::make_move_iterator(it->second.begin()),
                   std::make_move_iterator(it->second.end()));
        m_queue.erase(it);
    }
    return out;
}

std::variant<Drop, Send<DataPacket>, Delivered>
RoutingNode::ForwardData(Environment& env, DataPacket packet, NodeId prevHop)
{
    if (!WellFormed(packet, env.SharedKeys().NodeCount()))
    {
        return Drop{DropReason::Malformed, prevHop};
    }
    const NodeId expectedAtDest = packet.route.empty() ? packet.source : packet.route.back();
    if (packet.dest == m_id)
    {
        if (prevHop != expectedAtDest)
        {
            return Drop{DropReason::NotInRoute, prevHop};
        }
        if (m_config.creditDataPackets)
        {
            CreditReceipt(env, prevHop);
        }
        return Delivered{std::move(packet)};
    }
    const auto pos = PositionOf(packet.route, m_id);
    if (!pos)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    const NodeId expectedPrev = *pos == 0 ? packet.source : packet.route[*pos - 1];
    if (prevHop != expectedPrev)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    if (!Trusts(prevHop))
    {
        return Drop{DropReason::ProhibitedNode, prevHop};
    }
    if (m_config.creditDataPackets)
    {
        CreditReceipt(env, prevHop);
    }
    const NodeId next = *pos + 1 < packet.route.size() ? packet.route[*pos + 1] : packet.dest;
    if (!Trusts(next))
    {
        return Drop{DropReason::ProhibitedNode, next};
    }
    if (!env.InRange(m_id, next))
    {
        return Drop{DropReason::LinkBreak, next};
    }
    return Send<DataPacket>{std::move(packet), next, 0};
}

std::optional<Send<RouteError>>
RoutingNode::ReportBrokenForward(const DataPacket& packet, NodeId unreachable, RouteErrorCause cause)
{
    if (packet.source == m_id)
    {
        auto it = m_routes.find(packet.dest);
        if (it != m_routes.end() && it->second.nodes == packet.route)
        {
            it->second.valid = false;
        }
        return std::nullopt;
    }
    const auto pos = PositionOf(packet.route, m_id);
    if (!pos)
    {
        return std::nullopt;
    }
    RouteError err;
    err.origin = packet.source;
    err.dest = packet.dest;
    err.reporter = m_id;
    err.unreachable = unreachable;
    err.cause = cause;
    err.flowId = packet.flowId;
    err.sequence = packet.sequence;
    err.route = packet.route;
    const NodeId upstream = *pos == 0 ? packet.source : packet.route[*pos - 1];
    return Send<RouteError>{std::move(err), upstream, 0};
}

std::variant<Drop, Send<RouteError>, RouteInvalidated>
RoutingNode::HandleRouteError(Environment& env, const RouteError& error, NodeId prevHop)
{
    if (!WellFormed(error, env.SharedKeys().NodeCount()))
    {
        return Drop{DropReason::Malformed, prevHop};
    }
    if (error.origin == m_id)
    {
        auto it = m_routes.find(error.dest);
        if (it != m_routes.end() && it->second.valid && it->second.nodes == error.route)
        {
            it->second.valid = false;
            return RouteInvalidated{error.dest};
        }
        return Drop{DropReason::Stale};
    }
    const auto pos = PositionOf(error.route, m_id);
    if (!pos)
    {
        return Drop{DropReason::NotInRoute, prevHop};
    }
    const NodeId upstream = *pos == 0 ? error.origin : error.route[*pos - 1];
    if (!env.InRange(m_id, upstream))
    {
        return Drop{DropReason::LinkBreak, upstream};
    }
    return Send<RouteError>{error, upstream, 0};
}

bool
RoutingNode::WantsWatch(const DataPacket& packet, NodeId nextHop) const
{
    return IsLararp() && m_config.watchdog && nextHop != packet.dest;
}

void
RoutingNode::Watch(const DataPacket& packet, NodeId suspect)
{
    m_watch[{suspect, packet.flowId, packet.sequence}] = packet;
}

void
RoutingNode::Overheard(NodeId sender, const DataPacket& packet)
{
    m_watch.erase({sender, packet.flowId, packet.sequence});
}

void
RoutingNode::ForgetWatch(NodeId suspect, std::uint32_t flowId, std::uint32_t sequence)
{
    m_watch.erase({suspect, flowId, sequence});
}

std::optional<DataPacket>
RoutingNode::WatchExpired(Environment& env, NodeId suspect, std::uint32_t flowId, std::uint32_t sequence)
{
    auto it = m_watch.find({suspect, flowId, sequence});
    if (it == m_watch.end())
    {
        return std::nullopt;
    }
    DataPacket packet = std::move(it->second);
    m_watch.erase(it);
    // Out of range now means we could not have overheard; no verdict.
    if (!env.InRange(m_id, suspect))
    {
        return std::nullopt;
    }
    Punish(env, suspect);
    return packet;
}

} // namespace lararp
