#pragma once

#include "lararp/crypto.hpp"
#include "lararp/protocol.hpp"
#include "lararp/scenario.hpp"

#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fixture
{

/// Static chain 0 - 1 - ... - n-1 with neighbours `spacing` metres apart and
/// one flow from 0 to n-1 starting at t=0.1.
lararp::ScenarioConfig LineScenario(std::size_t nodes, double spacing = 200.0);

std::string Hex(std::span<const std::uint8_t> bytes);

template <typename B>
    requires requires(const B& b) { b.bytes; }
std::string Hex(const B& block)
{
    return Hex(std::span<const std::uint8_t>(block.bytes));
}

/// Scripted world for driving RoutingNode handlers by hand. Reachability is
/// an explicit link set; every node owns a published chain.
class TestEnv : public lararp::Environment
{
  public:
    explicit TestEnv(std::size_t nodes, std::uint64_t seed = 1, std::size_t chainLength = 8);

    void Link(lararp::NodeId a, lararp::NodeId b);
    /// Links i and i+1 for every i.
    void LinkLine();

    lararp::KeyChain TakeChain(lararp::NodeId owner);

    bool InRange(lararp::NodeId a, lararp::NodeId b) const override;
    const lararp::SharedKeyTable& SharedKeys() const override;
    std::span<const lararp::Digest> Publics(lararp::NodeId owner) const override;
    void PublishChain(lararp::NodeId owner, const lararp::KeyChain& chain) override;
    lararp::RequestId NewRequestId() override;
    lararp::Secret NewChainSeed() override;
    void OnCredit(lararp::NodeId self, lararp::NodeId neighbor, lararp::CreditEvent event, int value) override;
    void OnKeyRollover(lararp::NodeId self) override;

    struct CreditRecord
    {
        lararp::NodeId self;
        lararp::NodeId neighbor;
        lararp::CreditEvent event;
        int value;
    };

    std::vector<CreditRecord> credits;
    std::size_t rollovers = 0;

  private:
    lararp::Rng m_rng;
    lararp::SharedKeyTable m_keys;
    std::vector<lararp::KeyChain> m_chains;
    std::vector<std::vector<lararp::Digest>> m_publics;
    std::set<std::pair<lararp::NodeId, lararp::NodeId>> m_links;
    std::uint64_t m_requests = 0;
};

} // namespace fixture
