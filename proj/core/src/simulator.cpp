#include "lararp/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace lararp
{

namespace
{

// Stream ids for Rng::Fork.
constexpr std::uint64_t kPlacementStream = 1;
constexpr std::uint64_t kAttackerStream = 2;
constexpr std::uint64_t kFlowStream = 3;
constexpr std::uint64_t kKeyStream = 4;
constexpr std::uint64_t kRequestIdStream = 5;
constexpr std::uint64_t kChainSeedStream = 6;
constexpr std::uint64_t kMobilityStream = 0x1000;
constexpr std::uint64_t kAdversaryStream = 0x100000;

const char*
TypeTag(const Message& m)
{
    switch (TypeOf(m))
    {
    case MessageType::Rreq:
        return "rreq";
    case MessageType::Rrep:
        return "rrep";
    case MessageType::Data:
        return "data";
    case MessageType::Rerr:
        return "rerr";
    }
    return "?";
}

/// Node that handed packet to holder, or kNoNode at the source.
NodeId
Upstream(const DataPacket& packet, NodeId holder)
{
    if (holder == packet.source)
    {
        return kNoNode;
    }
    auto it = std::find(packet.route.begin(), packet.route.end(), holder);
    if (it == packet.route.end())
    {
        return kNoNode;
    }
    return it == packet.route.begin() ? packet.source : *(it - 1);
}

std::string
CulpritText(NodeId culprit)
{
    return culprit == kNoNode ? std::string("-") : std::to_string(culprit);
}

} // namespace

double
TransmissionDelay(std::size_t bytes, double bandwidth, double processing)
{
    if (!(bandwidth > 0.0))
    {
        throw InvalidParameter("TransmissionDelay: bandwidth must be positive");
    }
    return static_cast<double>(bytes) * 8.0 / bandwidth + processing;
}

Simulator::Simulator(ScenarioConfig config, bool keepLog)
    : m_config(std::move(config)),
      m_log(keepLog),
      m_rng(m_config.seed),
      m_idRng(0),
      m_seedRng(0),
      m_mobility(MobilityParams{}, {})
{
    m_config.Validate();
    const std::uint32_t n = m_config.nodeCount;

    Rng placementRng = m_rng.Fork(kPlacementStream);
    Rng attackerRng = m_rng.Fork(kAttackerStream);
    Rng flowRng = m_rng.Fork(kFlowStream);
    Rng keyRng = m_rng.Fork(kKeyStream);
    m_idRng = m_rng.Fork(kRequestIdStream);
    m_seedRng = m_rng.Fork(kChainSeedStream);

    std::vector<Vec2> initial = m_config.positions.empty()
                                    ? RandomPlacement(n, m_config.areaWidth, m_config.areaHeight, placementRng)
                                    : m_config.positions;
    m_mobility = MobilityState(MobilityParams::From(m_config), std::move(initial));
    m_mobilityRng.reserve(n);
    for (NodeId i = 0; i < n; ++i)
    {
        m_mobilityRng.push_back(m_rng.Fork(kMobilityStream + i));
    }

    // Attackers: explicit ids or a uniform draw without replacement.
    if (!m_config.attackerIds.empty())
    {
        m_attackerIds = m_config.attackerIds;
    }
    else
    {
        std::vector<NodeId> ids(n);
        std::iota(ids.begin(), ids.end(), 0);
        for (std::uint32_t i = 0; i < m_config.attackerCount; ++i)
        {
            const auto j = i + attackerRng.Below(n - i);
            std::swap(ids[i], ids[j]);
        }
        m_attackerIds.assign(ids.begin(), ids.begin() + m_config.attackerCount);
    }
    std::sort(m_attackerIds.begin(), m_attackerIds.end());

    // Flows: explicit pairs or distinct random pairs of honest nodes.
    if (!m_config.flows.empty())
    {
        m_flows = m_config.flows;
    }
    else
    {
        std::vector<NodeId> honest;
        for (NodeId i = 0; i < n; ++i)
        {
            if (!std::binary_search(m_attackerIds.begin(), m_attackerIds.end(), i))
            {
                honest.push_back(i);
            }
        }
        std::set<std::pair<NodeId, NodeId>> used;
        while (m_flows.size() < m_config.flowCount)
        {
            const NodeId s = honest[flowRng.Below(honest.size())];
            const NodeId d = honest[flowRng.Below(honest.size())];
            if (s != d && used.insert({s, d}).second)
            {
                m_flows.push_back({s, d});
            }
        }
    }
    const double interval = 1.0 / m_config.packetRate;
    for (std::size_t f = 0; f < m_flows.size(); ++f)
    {
        m_flowStart.push_back(m_config.flowStart ? *m_config.flowStart : flowRng.Uniform(0.0, interval));
    }

    m_keys = SharedKeyTable::Provision(n, keyRng);
    m_publics.resize(n);
    m_nodes.reserve(n);
    m_adversaries.resize(n);
    for (NodeId i = 0; i < n; ++i)
    {
        KeyChain chain = KeyChain::Generate(i, NewChainSeed(), m_config.protocol.chainLength);
        PublishChain(i, chain);
        m_nodes.emplace_back(i, m_config.protocol, std::move(chain));
        if (std::binary_search(m_attackerIds.begin(), m_attackerIds.end(), i))
        {
            m_adversaries[i] =
                std::make_unique<Adversary>(m_config.attack, m_rng.Fork(kAdversaryStream + i), n);
        }
    }
}

Vec2
Simulator::Position(NodeId id) const
{
    return m_mobility.PositionAt(id, m_now);
}

std::vector<NodeId>
Simulator::Neighbors(NodeId node) const
{
    std::vector<NodeId> out;
    const Vec2 p = Position(node);
    for (NodeId i = 0; i < m_nodes.size(); ++i)
    {
        if (i != node && WithinRange(p, Position(i), m_config.radioRange))
        {
            out.push_back(i);
        }
    }
    return out;
}

bool
Simulator::InRange(NodeId a, NodeId b) const
{
    if (a == b || a >= m_nodes.size() || b >= m_nodes.size())
    {
        return false;
    }
    return WithinRange(Position(a), Position(b), m_config.radioRange);
}

const SharedKeyTable&
Simulator::SharedKeys() const
{
    return m_keys;
}

std::span<const Digest>
Simulator::Publics(NodeId owner) const
{
    if (owner >= m_publics.size())
    {
        return {};
    }
    return m_publics[owner];
}

void
Simulator::PublishChain(NodeId owner, const KeyChain& chain)
{
    auto publics = chain.Publics();
    m_publics.at(owner).insert(m_publics.at(owner).end(), publics.begin(), publics.end());
}

RequestId
Simulator::NewRequestId()
{
    return m_idRng.FillBytes<8>();
}

Secret
Simulator::NewChainSeed()
{
    return m_seedRng.FillBlock<Secret>();
}

void
Simulator::OnCredit(NodeId self, NodeId neighbor, CreditEvent event, int value)
{
    m_log.Record(m_now,
                 self,
                 "credit",
                 "neighbor=%u event=%s value=%d",
                 neighbor,
                 event == CreditEvent::Forwarded ? "forwarded" : "misbehaved",
                 value);
}

void
Simulator::OnKeyRollover(NodeId self)
{
    m_log.Record(m_now, self, "rollover", "%s", "");
}

void
Simulator::Schedule(double time, Payload payload)
{
    m_queue.push(Event{time, m_ordinal++, std::move(payload)});
}

void
Simulator::Setup()
{
    const auto& p = m_config.protocol;
    m_log.Record(0.0,
                 kNoNode,
                 "config",
                 "protocol=%s nodes=%u area=%.17g,%.17g speed=%.17g,%.17g pause=%.17g "
                 "initial_credit=%d punish_delta=%d credit_threshold=%d seed=%llu attacker_ids=%s",
                 ProtocolName(p.protocol),
                 m_config.nodeCount,
                 m_config.areaWidth,
                 m_config.areaHeight,
                 m_config.speedMin,
                 m_config.speedMax,
                 m_config.pauseTime,
                 p.initialCredit,
                 p.punishDelta,
                 p.creditThreshold,
                 static_cast<unsigned long long>(m_config.seed),
                 FormatIds(m_attackerIds).c_str());

    if (m_config.mobility == MobilityKind::RandomWaypoint)
    {
        for (NodeId i = 0; i < m_nodes.size(); ++i)
        {
            Schedule(0.0, LegEnd{i});
        }
    }
    else
    {
        for (NodeId i = 0; i < m_nodes.size(); ++i)
        {
            const Vec2 pos = m_mobility.PositionAt(i, 0.0);
            m_log.Record(0.0, i, "place", "x=%.17g y=%.17g", pos.x, pos.y);
        }
    }
    for (std::uint32_t f = 0; f < m_flows.size(); ++f)
    {
        if (m_flowStart[f] < m_config.simTime)
        {
            Schedule(m_flowStart[f], CbrTick{f, 0});
        }
    }
    for (NodeId a : m_attackerIds)
    {
        if (m_config.attack.kind == AttackKind::ControlFlood)
        {
            Schedule(m_adversaries[a]->FloodInterval() * m_rng.Uniform(), FloodTick{a});
        }
    }
}

RunResult
Simulator::Run()
{
    if (m_ran)
    {
        throw InvalidParameter("Simulator::Run: already ran");
    }
    m_ran = true;
    Setup();
    while (!m_queue.empty() && m_queue.top().time <= m_config.simTime)
    {
        Event e = m_queue.top();
        m_queue.pop();
        m_now = e.time;
        std::visit([this](const auto& payload) { Dispatch(payload); }, e.payload);
    }
    m_now = m_config.simTime;
    Finish();

    RunResult result;
    result.report = m_report;
    result.log = m_log.Release();
    result.flows = m_flows;
    result.attackers = m_attackerIds;
    return result;
}

void
Simulator::Finish()
{
    while (!m_queue.empty())
    {
        const Event& e = m_queue.top();
        if (const auto* a = std::get_if<Arrival>(&e.payload))
        {
            if (const auto* d = std::get_if<DataPacket>(&a->message))
            {
                ++m_report.dataInFlightEnd;
                m_log.Record(m_now, a->from, "in_flight_end", "flow=%u seq=%u where=air", d->flowId, d->sequence);
            }
        }
        m_queue.pop();
    }
    for (const FlowSpec& f : m_flows)
    {
        // Each source holds at most one queue per destination.
        for (const DataPacket& d : m_nodes[f.source].TakeQueued(f.dest))
        {
            ++m_report.dataInFlightEnd;
            m_log.Record(m_now, f.source, "in_flight_end", "flow=%u seq=%u where=queue", d.flowId, d.sequence);
        }
    }
    for (const auto& node : m_nodes)
    {
        const NodeStats& s = node.Stats();
        m_report.revealChecks += s.revealChecks;
        m_report.tagChecks += s.tagChecks;
        m_report.tagComputations += s.tagComputations;
        m_report.destHopTagChecks += s.destHopTagChecks;
        m_report.keyRollovers += s.keyRollovers;
        for (const auto& [neighbor, value] : node.Ntt().Entries())
        {
            m_log.Record(m_now, node.Id(), "ntt_final", "neighbor=%u value=%d", neighbor, value);
        }
    }
}

void
Simulator::LogDrop(NodeId node, const char* type, const Drop& drop)
{
    ++m_report.controlDrops[static_cast<std::size_t>(drop.reason)];
    if (drop.reason == DropReason::Duplicate)
    {
        // Counted, not logged: every flood produces one per neighbour.
        return;
    }
    m_log.Record(m_now,
                 node,
                 "drop",
                 "type=%s reason=%s culprit=%s",
                 type,
                 ToString(drop.reason),
                 CulpritText(drop.culprit).c_str());
}

void
Simulator::DropData(NodeId node, const DataPacket& packet, DropReason reason)
{
    ++m_report.dataDropped;
    ++m_report.dataDrops[static_cast<std::size_t>(reason)];
    m_log.Record(m_now, node, "data_drop", "flow=%u seq=%u reason=%s", packet.flowId, packet.sequence, ToString(reason));
}

void
Simulator::Emit(NodeId sender, const Transmit& t)
{
    const std::size_t size = WireSize(t.message);
    const double processing = t.processingDelay
                                  ? *t.processingDelay
                                  : m_config.processingDelay + t.cryptoOps * m_config.cryptoDelay;
    const double arrival = m_now + TransmissionDelay(size, m_config.bandwidth, processing);

    switch (TypeOf(t.message))
    {
    case MessageType::Rreq:
        ++m_report.rreqTx;
        break;
    case MessageType::Rrep:
        ++m_report.rrepTx;
        break;
    case MessageType::Data:
        ++m_report.dataTx;
        break;
    case MessageType::Rerr:
        ++m_report.rerrTx;
        break;
    }
    if (t.nextHop == kBroadcast)
    {
        m_log.Record(m_now, sender, "tx", "type=%s to=* size=%zu", TypeTag(t.message), size);
    }
    else
    {
        m_log.Record(m_now, sender, "tx", "type=%s to=%u size=%zu", TypeTag(t.message), t.nextHop, size);
    }

    if (const auto* packet = std::get_if<DataPacket>(&t.message))
    {
        // The node that handed us this packet overhears the forward.
        const NodeId up = Upstream(*packet, sender);
        if (up != kNoNode && InRange(sender, up))
        {
            m_nodes[up].Overheard(sender, *packet);
        }
        RoutingNode& node = m_nodes[sender];
        if (node.WantsWatch(*packet, t.nextHop))
        {
            node.Watch(*packet, t.nextHop);
            Schedule(m_now + m_config.protocol.watchdogTimeout,
                     WatchdogExpire{sender, t.nextHop, packet->flowId, packet->sequence});
        }
    }

    if (t.nextHop == kBroadcast)
    {
        for (NodeId n : Neighbors(sender))
        {
            Schedule(arrival, Arrival{sender, n, t.message});
        }
    }
    else
    {
        Schedule(arrival, Arrival{sender, t.nextHop, t.message});
    }
}

void
Simulator::StartDiscovery(NodeId source, const Send<Rreq>& request)
{
    Emit(source, Transmit{request.message, kBroadcast, 0.0, std::nullopt, request.cryptoOps});
    Schedule(m_now + m_config.protocol.routeTimeout, DiscoveryTimer{source});
}

void
Simulator::SendData(NodeId source, DataPacket packet)
{
    const DataPacket copy = packet;
    auto result = m_nodes[source].OriginateData(*this, std::move(packet), m_now);
    if (auto* send = std::get_if<Send<DataPacket>>(&result))
    {
        Emit(source, Transmit{std::move(send->message), send->nextHop, 0.0, std::nullopt, send->cryptoOps});
    }
    else if (auto* queued = std::get_if<Queued>(&result))
    {
        for (const DataPacket& d : queued->evicted)
        {
            DropData(source, d, DropReason::QueueFull);
        }
        if (queued->discovery)
        {
            StartDiscovery(source, *queued->discovery);
        }
    }
    else
    {
        DropData(source, copy, std::get<Drop>(result).reason);
    }
}

void
Simulator::ReportBroken(NodeId node, const DataPacket& packet, NodeId unreachable, RouteErrorCause cause)
{
    auto err = m_nodes[node].ReportBrokenForward(packet, unreachable, cause);
    if (err)
    {
        Emit(node, Transmit{std::move(err->message), err->nextHop, 0.0, std::nullopt, err->cryptoOps});
    }
    else if (node == packet.source)
    {
        m_log.Record(m_now, node, "route_invalid", "dest=%u", packet.dest);
    }
}

Simulator::Outcome
Simulator::Process(NodeId self, NodeId from, const Message& message)
{
    RoutingNode& node = m_nodes[self];
    Outcome out;

    if (const auto* rreq = std::get_if<Rreq>(&message))
    {
        if (rreq->dest == self)
        {
            auto r = node.HandleRreqAtDestination(*this, *rreq, from);
            if (auto* drop = std::get_if<Drop>(&r))
            {
                LogDrop(self, "rreq", *drop);
                return out;
            }
            auto& send = std::get<Send<Rrep>>(r);
            m_log.Record(m_now, self, "rrep_issue", "source=%u route=%s", send.message.source,
                         FormatIds(send.message.route).c_str());
            out.transmit = Transmit{std::move(send.message), send.nextHop, 0.0, std::nullopt, send.cryptoOps};
            return out;
        }
        auto r = node.HandleRreq(*this, *rreq, from);
        if (auto* drop = std::get_if<Drop>(&r))
        {
            LogDrop(self, "rreq", *drop);
            return out;
        }
        auto& send = std::get<Send<Rreq>>(r);
        out.transmit = Transmit{std::move(send.message), send.nextHop, 0.0, std::nullopt, send.cryptoOps};
        out.relay = true;
        return out;
    }

    if (const auto* rrep = std::get_if<Rrep>(&message))
    {
        if (rrep->source == self)
        {
            auto r = node.HandleRrepAtSource(*this, *rrep, from, m_now);
            if (auto* drop = std::get_if<Drop>(&r))
            {
                LogDrop(self, "rrep", *drop);
                return out;
            }
            const RouteEntry& route = std::get<RouteAccepted>(r).route;
            ++m_report.routesAccepted;
            m_log.Record(m_now, self, "route_accept", "dest=%u route=%s", route.dest, FormatIds(route.nodes).c_str());
            for (DataPacket& d : node.TakeQueued(route.dest))
            {
                SendData(self, std::move(d));
            }
            return out;
        }
        auto r = node.HandleRrep(*this, *rrep, from);
        if (auto* drop = std::get_if<Drop>(&r))
        {
            LogDrop(self, "rrep", *drop);
            return out;
        }
        auto& send = std::get<Send<Rrep>>(r);
        m_log.Record(m_now, self, "rrep_forward", "source=%u dest=%u route=%s", send.message.source,
                     send.message.dest, FormatIds(send.message.route).c_str());
        out.transmit = Transmit{std::move(send.message), send.nextHop, 0.0, std::nullopt, send.cryptoOps};
        out.relay = true;
        return out;
    }

    if (const auto* packet = std::get_if<DataPacket>(&message))
    {
        auto r = node.ForwardData(*this, *packet, from);
        if (auto* delivered = std::get_if<Delivered>(&r))
        {
            const double delay = m_now - delivered->packet.createdAt;
            ++m_report.dataDelivered;
            m_report.delaySum += delay;
            m_log.Record(m_now, self, "data_deliver", "flow=%u seq=%u delay=%.17g", packet->flowId,
                         packet->sequence, delay);
            return out;
        }
        if (auto* drop = std::get_if<Drop>(&r))
        {
            DropData(self, *packet, drop->reason);
            if (packet->dest != self)
            {
                ReportBroken(self,
                             *packet,
                             drop->culprit,
                             drop->reason == DropReason::LinkBreak ? RouteErrorCause::LinkBreak
                                                                   : RouteErrorCause::Misbehaviour);
            }
            return out;
        }
        auto& send = std::get<Send<DataPacket>>(r);
        out.transmit = Transmit{std::move(send.message), send.nextHop, 0.0, std::nullopt, send.cryptoOps};
        out.relay = true;
        return out;
    }

    const auto& error = std::get<RouteError>(message);
    // An error from the watched neighbour explains the missing forward.
    node.ForgetWatch(from, error.flowId, error.sequence);
    auto r = node.HandleRouteError(*this, error, from);
    if (auto* drop = std::get_if<Drop>(&r))
    {
        LogDrop(self, "rerr", *drop);
        return out;
    }
    if (auto* inv = std::get_if<RouteInvalidated>(&r))
    {
        m_log.Record(m_now, self, "route_invalid", "dest=%u", inv->dest);
        return out;
    }
    auto& send = std::get<Send<RouteError>>(r);
    out.transmit = Transmit{std::move(send.message), send.nextHop, 0.0, std::nullopt, send.cryptoOps};
    out.relay = true;
    return out;
}

void
Simulator::Dispatch(const Arrival& e)
{
    if (!InRange(e.from, e.to))
    {
        if (const auto* packet = std::get_if<DataPacket>(&e.message))
        {
            ++m_report.dataLost;
            m_log.Record(m_now, e.to, "data_lost", "flow=%u seq=%u from=%u", packet->flowId, packet->sequence, e.from);
            // Link-layer failure reported back to the sender.
            m_nodes[e.from].ForgetWatch(e.to, packet->flowId, packet->sequence);
            ReportBroken(e.from, *packet, e.to, RouteErrorCause::LinkBreak);
        }
        else
        {
            m_log.Record(m_now, e.to, "lost", "type=%s from=%u", TypeTag(e.message), e.from);
        }
        return;
    }

    Outcome outcome = Process(e.to, e.from, e.message);
    Adversary* adversary = m_adversaries[e.to].get();
    if (adversary == nullptr || !outcome.relay)
    {
        if (outcome.transmit)
        {
            Emit(e.to, *outcome.transmit);
        }
        return;
    }

    for (AttackAction& action : adversary->Apply(InboundEvent{e.message, e.from, outcome.transmit}))
    {
        if (auto* t = std::get_if<Transmit>(&action))
        {
            if (t->delay > 0.0)
            {
                Schedule(m_now + t->delay, Inject{e.to, std::move(*t)});
            }
            else
            {
                Emit(e.to, *t);
            }
            continue;
        }
        const Discard& discard = std::get<Discard>(action);
        if (const auto* packet = std::get_if<DataPacket>(&e.message))
        {
            DropData(e.to, *packet, discard.reason);
        }
        else
        {
            LogDrop(e.to, TypeTag(e.message), Drop{discard.reason, e.to});
        }
    }
}

void
Simulator::Dispatch(const DiscoveryTimer& e)
{
    for (TimerAction& action : m_nodes[e.node].OnTimer(*this, m_now))
    {
        if (auto* again = std::get_if<Rediscover>(&action))
        {
            StartDiscovery(e.node, again->request);
            continue;
        }
        const Unroutable& gaveUp = std::get<Unroutable>(action);
        m_log.Record(m_now, e.node, "unroutable", "dest=%u dropped=%zu", gaveUp.dest, gaveUp.dropped.size());
        for (const DataPacket& d : gaveUp.dropped)
        {
            DropData(e.node, d, DropReason::NoRoute);
        }
    }
}

void
Simulator::Dispatch(const LegEnd& e)
{
    const Leg& leg = m_mobility.AdvanceLeg(e.node, m_mobilityRng[e.node]);
    m_log.Record(m_now,
                 e.node,
                 "leg",
                 "from=%.17g,%.17g to=%.17g,%.17g speed=%.17g depart=%.17g arrive=%.17g",
                 leg.origin.x,
                 leg.origin.y,
                 leg.waypoint.x,
                 leg.waypoint.y,
                 leg.speed,
                 leg.departAt,
                 leg.arriveAt);
    if (leg.arriveAt <= m_config.simTime)
    {
        Schedule(leg.arriveAt, LegEnd{e.node});
    }
}

void
Simulator::Dispatch(const CbrTick& e)
{
    const FlowSpec& flow = m_flows[e.flow];
    DataPacket packet;
    packet.flowId = e.flow;
    packet.sequence = e.sequence;
    packet.source = flow.source;
    packet.dest = flow.dest;
    packet.payloadSize = m_config.packetSize;
    packet.createdAt = m_now;
    ++m_report.dataSent;
    m_log.Record(m_now, flow.source, "data_send", "flow=%u seq=%u dest=%u", e.flow, e.sequence, flow.dest);
    SendData(flow.source, std::move(packet));

    const double next = m_flowStart[e.flow] + static_cast<double>(e.sequence + 1) / m_config.packetRate;
    if (next < m_config.simTime)
    {
        Schedule(next, CbrTick{e.flow, e.sequence + 1});
    }
}

void
Simulator::Dispatch(const WatchdogExpire& e)
{
    auto packet = m_nodes[e.watcher].WatchExpired(*this, e.suspect, e.flow, e.sequence);
    if (!packet)
    {
        return;
    }
    ++m_report.detections;
    m_log.Record(m_now, e.watcher, "detect", "suspect=%u flow=%u seq=%u", e.suspect, e.flow, e.sequence);
    ReportBroken(e.watcher, *packet, e.suspect, RouteErrorCause::Misbehaviour);
}

void
Simulator::Dispatch(const FloodTick& e)
{
    Adversary& adversary = *m_adversaries[e.node];
    const NodeId target = adversary.FloodTarget(e.node);
    Send<Rreq> request = m_nodes[e.node].BuildRequest(*this, target);
    Emit(e.node, Transmit{std::move(request.message), kBroadcast, 0.0, std::nullopt, request.cryptoOps});
    const double next = m_now + adversary.FloodInterval();
    if (next < m_config.simTime)
    {
        Schedule(next, FloodTick{e.node});
    }
}

void
Simulator::Dispatch(const Inject& e)
{
    Emit(e.node, e.transmit);
}

RunResult
RunScenario(const ScenarioConfig& config, bool keepLog)
{
    Simulator sim(config, keepLog);
    return sim.Run();
}

} // namespace lararp
