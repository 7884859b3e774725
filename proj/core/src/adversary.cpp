#include "lararp/adversary.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace lararp
{

namespace
{

struct AttackNameEntry
{
    AttackKind kind;
    const char* name;
};

constexpr std::array<AttackNameEntry, 7> kAttackNames{{
    {AttackKind::None, "none"},
    {AttackKind::BlackHole, "blackhole"},
    {AttackKind::GrayHole, "grayhole"},
    {AttackKind::Tamper, "tamper"},
    {AttackKind::Replay, "replay"},
    {AttackKind::Rushing, "rushing"},
    {AttackKind::ControlFlood, "flood"},
}};

struct FieldNameEntry
{
    TamperField field;
    const char* name;
};

constexpr std::array<FieldNameEntry, 15> kFieldNames{{
    {TamperField::RequestId, "request_id"},
    {TamperField::SourceTag, "source_tag"},
    {TamperField::VerifierIndex, "verifier_index"},
    {TamperField::VerifierSecret, "verifier_secret"},
    {TamperField::SourceId, "source_id"},
    {TamperField::DestId, "dest_id"},
    {TamperField::NodeList, "node_list"},
    {TamperField::HopTags, "hop_tags"},
    {TamperField::RequestIdTag, "request_id_tag"},
    {TamperField::Route, "route"},
    {TamperField::DestTag, "dest_tag"},
    {TamperField::RouteTags, "route_tags"},
    {TamperField::ReverseHopTags, "reverse_hop_tags"},
    {TamperField::ReplySourceId, "reply_source_id"},
    {TamperField::ReplyDestId, "reply_dest_id"},
}};

template <typename B>
void
FlipBit(B& block)
{
    block.bytes[0] ^= 0x01;
}

} // namespace

const char*
AttackName(AttackKind kind)
{
    for (const auto& e : kAttackNames)
    {
        if (e.kind == kind)
        {
            return e.name;
        }
    }
    return "?";
}

AttackKind
ParseAttack(std::string_view name)
{
    for (const auto& e : kAttackNames)
    {
        if (name == e.name)
        {
            return e.kind;
        }
    }
    throw ConfigError("unknown attack kind '" + std::string(name) + "'");
}

const char*
TamperFieldName(TamperField field)
{
    for (const auto& e : kFieldNames)
    {
        if (e.field == field)
        {
            return e.name;
        }
    }
    return "?";
}

TamperField
ParseTamperField(std::string_view name)
{
    for (const auto& e : kFieldNames)
    {
        if (name == e.name)
        {
            return e.field;
        }
    }
    throw ConfigError("unknown tamper field '" + std::string(name) + "'");
}

bool
IsRequestField(TamperField field)
{
    return field <= TamperField::HopTags;
}

void
AttackerProfile::Validate() const
{
    if (!(dropProbability >= 0.0 && dropProbability <= 1.0))
    {
        throw ConfigError("attack_drop_probability must lie in [0, 1]");
    }
    if (replayBuffer == 0)
    {
        throw ConfigError("attack_replay_buffer must be positive");
    }
    if (!(replayDelay > 0.0))
    {
        throw ConfigError("attack_replay_delay must be positive");
    }
    if (!(floodRate > 0.0))
    {
        throw ConfigError("attack_flood_rate must be positive");
    }
}

Adversary::Adversary(AttackerProfile profile, Rng rng, std::size_t nodeCount)
    : m_profile(profile),
      m_rng(std::move(rng)),
      m_nodeCount(nodeCount)
{
    m_profile.Validate();
}

double
Adversary::FloodInterval() const
{
    return 1.0 / m_profile.floodRate;
}

NodeId
Adversary::FloodTarget(NodeId self)
{
    if (m_nodeCount < 2)
    {
        throw InvalidParameter("FloodTarget: needs at least two nodes");
    }
    NodeId target = static_cast<NodeId>(m_rng.Below(m_nodeCount - 1));
    return target >= self ? target + 1 : target;
}

NodeId
Adversary::UnusedId(std::span<const NodeId> taken) const
{
    for (NodeId id = 0; id < m_nodeCount; ++id)
    {
        if (std::find(taken.begin(), taken.end(), id) == taken.end())
        {
            return id;
        }
    }
    return static_cast<NodeId>(m_nodeCount);
}

void
Adversary::Mutate(Message& message) const
{
    if (auto* rreq = std::get_if<Rreq>(&message))
    {
        std::vector<NodeId> taken = rreq->nodeList;
        taken.push_back(rreq->source);
        taken.push_back(rreq->dest);
        switch (m_profile.tamperField)
        {
        case TamperField::RequestId:
            rreq->requestId[0] ^= 0x01;
            break;
        case TamperField::SourceTag:
            FlipBit(rreq->sourceTag);
            break;
        case TamperField::VerifierIndex:
            rreq->verifier.index += 1;
            break;
        case TamperField::VerifierSecret:
            FlipBit(rreq->verifier.secret);
            break;
        case TamperField::SourceId:
            rreq->source = UnusedId(taken);
            break;
        case TamperField::DestId:
            rreq->dest = UnusedId(taken);
            break;
        case TamperField::NodeList:
            if (!rreq->nodeList.empty())
            {
                rreq->nodeList.front() = UnusedId(taken);
            }
            break;
        case TamperField::HopTags:
            for (auto& tag : rreq->hopTags)
            {
                FlipBit(tag);
            }
            break;
        default:
            break;
        }
        return;
    }
    if (auto* rrep = std::get_if<Rrep>(&message))
    {
        std::vector<NodeId> taken = rrep->route;
        taken.push_back(rrep->source);
        taken.push_back(rrep->dest);
        switch (m_profile.tamperField)
        {
        case TamperField::RequestIdTag:
            FlipBit(rrep->requestIdTag);
            break;
        case TamperField::Route:
            if (!rrep->route.empty())
            {
                rrep->route.front() = UnusedId(taken);
            }
            break;
        case TamperField::DestTag:
            FlipBit(rrep->destTag);
            break;
        case TamperField::RouteTags:
            for (auto& tag : rrep->routeTags)
            {
                FlipBit(tag);
            }
            break;
        case TamperField::ReverseHopTags:
            for (auto& tag : rrep->reverseHopTags)
            {
                FlipBit(tag);
            }
            break;
        case TamperField::ReplySourceId:
            rrep->source = UnusedId(taken);
            break;
        case TamperField::ReplyDestId:
            rrep->dest = UnusedId(taken);
            break;
        default:
            break;
        }
    }
}

std::vector<AttackAction>
Adversary::Apply(const InboundEvent& event)
{
    std::vector<AttackAction> actions;
    const bool isData = std::holds_alternative<DataPacket>(event.received);
    const bool isControl = std::holds_alternative<Rreq>(event.received) ||
                           std::holds_alternative<Rrep>(event.received);

    switch (m_profile.kind)
    {
    case AttackKind::BlackHole:
        if (isData && event.honest)
        {
            actions.emplace_back(Discard{});
            return actions;
        }
        break;
    case AttackKind::GrayHole:
        if (isData && event.honest && m_rng.Bernoulli(m_profile.dropProbability))
        {
            actions.emplace_back(Discard{});
            return actions;
        }
        break;
    case AttackKind::Tamper:
        if (isControl && event.honest)
        {
            Transmit t = *event.honest;
            Mutate(t.message);
            actions.emplace_back(std::move(t));
            return actions;
        }
        break;
    case AttackKind::Replay:
        if (isControl && event.honest)
        {
            actions.emplace_back(*event.honest);
            Transmit copy = *event.honest;
            copy.delay = m_profile.replayDelay;
            m_replayStore.push_back(copy);
            if (m_replayStore.size() > m_profile.replayBuffer)
            {
                m_replayStore.pop_front();
            }
            actions.emplace_back(std::move(copy));
            return actions;
        }
        break;
    case AttackKind::Rushing:
        if (std::holds_alternative<Rreq>(event.received) && event.honest)
        {
            Transmit t = *event.honest;
            t.processingDelay = 0.0;
            actions.emplace_back(std::move(t));
            return actions;
        }
        break;
    case AttackKind::None:
    case AttackKind::ControlFlood:
        break;
    }
    if (event.honest)
    {
        actions.emplace_back(*event.honest);
    }
    return actions;
}

} // namespace lararp
