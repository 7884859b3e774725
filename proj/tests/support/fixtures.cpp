#include "fixtures.hpp"

#include <cstdio>

namespace fixture
{

using namespace lararp;

ScenarioConfig
LineScenario(std::size_t nodes, double spacing)
{
    ScenarioConfig c;
    c.nodeCount = static_cast<std::uint32_t>(nodes);
    c.areaWidth = std::max(1000.0, spacing * static_cast<double>(nodes));
    c.areaHeight = 1000.0;
    c.mobility = MobilityKind::Static;
    c.positions.clear();
    for (std::size_t i = 0; i < nodes; ++i)
    {
        c.positions.push_back(Vec2{spacing * static_cast<double>(i), 0.0});
    }
    c.flowCount = 1;
    c.flows = {FlowSpec{0, static_cast<NodeId>(nodes - 1)}};
    c.flowStart = 0.1;
    c.simTime = 5.0;
    c.attackerCount = 0;
    return c;
}

std::string
Hex(std::span<const std::uint8_t> bytes)
{
    std::string out;
    char buf[3];
    for (std::uint8_t b : bytes)
    {
        std::snprintf(buf, sizeof(buf), "%02x", b);
        out += buf;
    }
    return out;
}

TestEnv::TestEnv(std::size_t nodes, std::uint64_t seed, std::size_t chainLength)
    : m_rng(seed)
{
    Rng keyRng = m_rng.Fork(1);
    m_keys = SharedKeyTable::Provision(nodes, keyRng);
    for (NodeId i = 0; i < nodes; ++i)
    {
        m_chains.push_back(KeyChain::Generate(i, m_rng.FillBlock<Secret>(), chainLength));
        const auto pub = m_chains.back().Publics();
        m_publics.emplace_back(pub.begin(), pub.end());
    }
}

void
TestEnv::Link(NodeId a, NodeId b)
{
    m_links.insert({std::min(a, b), std::max(a, b)});
}

void
TestEnv::LinkLine()
{
    for (NodeId i = 0; i + 1 < m_chains.size(); ++i)
    {
        Link(i, i + 1);
    }
}

KeyChain
TestEnv::TakeChain(NodeId owner)
{
    return m_chains.at(owner);
}

bool
TestEnv::InRange(NodeId a, NodeId b) const
{
    return m_links.contains({std::min(a, b), std::max(a, b)});
}

const SharedKeyTable&
TestEnv::SharedKeys() const
{
    return m_keys;
}

std::span<const Digest>
TestEnv::Publics(NodeId owner) const
{
    return m_publics.at(owner);
}

void
TestEnv::PublishChain(NodeId owner, const KeyChain& chain)
{
    auto& pub = m_publics.at(owner);
    pub.insert(pub.end(), chain.Publics().begin(), chain.Publics().end());
}

RequestId
TestEnv::NewRequestId()
{
    RequestId id{};
    ++m_requests;
    for (int i = 0; i < 8; ++i)
    {
        id[i] = static_cast<std::uint8_t>(m_requests >> (8 * (7 - i)));
    }
    return id;
}

Secret
TestEnv::NewChainSeed()
{
    return m_rng.FillBlock<Secret>();
}

void
TestEnv::OnCredit(NodeId self, NodeId neighbor, CreditEvent event, int value)
{
    credits.push_back({self, neighbor, event, value});
}

void
TestEnv::OnKeyRollover(NodeId)
{
    ++rollovers;
}

} // namespace fixture
