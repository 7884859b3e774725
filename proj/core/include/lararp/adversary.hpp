#pragma once

#include "lararp/messages.hpp"
#include "lararp/protocol.hpp"
#include "lararp/rng.hpp"

#include <deque>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace lararp
{

enum class AttackKind
{
    None,
    BlackHole,
    GrayHole,
    Tamper,
    Replay,
    Rushing,
    ControlFlood,
};

const char* AttackName(AttackKind kind);
/// Accepts the lower-case names: none, blackhole, grayhole, tamper, replay,
/// rushing, flood. Throws ConfigError otherwise.
AttackKind ParseAttack(std::string_view name);

/// Field a Tamper attacker mutates on every request or reply it forwards.
enum class TamperField
{
    // Route request
    RequestId,
    SourceTag,
    VerifierIndex,
    VerifierSecret,
    SourceId,
    DestId,
    NodeList,
    HopTags,
    // Route reply
    RequestIdTag,
    Route,
    DestTag,
    RouteTags,
    ReverseHopTags,
    ReplySourceId,
    ReplyDestId,
};

const char* TamperFieldName(TamperField field);
TamperField ParseTamperField(std::string_view name);
bool IsRequestField(TamperField field);

struct AttackerProfile
{
    AttackKind kind = AttackKind::None;
    /// GrayHole: probability of dropping each data packet.
    double dropProbability = 0.5;
    TamperField tamperField = TamperField::NodeList;
    /// Replay: stored control messages kept, and re-injection delay.
    std::size_t replayBuffer = 16;
    double replayDelay = 0.5;
    /// ControlFlood: spurious requests per second.
    double floodRate = 2.0;

    /// Throws ConfigError when a parameter is out of range.
    void Validate() const;
};

/// Put a message on the air after delay seconds. processingDelay, when
/// set, replaces the sender's normal per-hop processing time.
struct Transmit
{
    Message message;
    NodeId nextHop = kBroadcast;
    double delay = 0.0;
    std::optional<double> processingDelay;
    unsigned cryptoOps = 0;
};

struct Discard
{
    DropReason reason = DropReason::Attack;
};

using AttackAction = std::variant<Transmit, Discard>;

/// A message arriving at an attacker together with what an honest node
/// would have sent in response (nothing when the honest handler dropped or
/// consumed it).
struct InboundEvent
{
    Message received;
    NodeId from = kNoNode;
    std::optional<Transmit> honest;
};

/**
 * \brief Attacker behaviour wrapped around a compromised node's handlers.
 *
 * Attackers are insiders: they hold valid shared keys and key chains and
 * run the honest handlers first, then distort the outcome.
 */
class Adversary
{
  public:
    Adversary(AttackerProfile profile, Rng rng, std::size_t nodeCount);

    const AttackerProfile& Profile() const
    {
        return m_profile;
    }

    std::vector<AttackAction> Apply(const InboundEvent& event);

    /// Seconds between ControlFlood emissions.
    double FloodInterval() const;

    /// Random destination for a spurious request from self.
    NodeId FloodTarget(NodeId self);

    /// Applies the configured tamper mutation in place.
    void Mutate(Message& message) const;

  private:
    NodeId UnusedId(std::span<const NodeId> taken) const;

    AttackerProfile m_profile;
    Rng m_rng;
    std::size_t m_nodeCount;
    std::deque<Transmit> m_replayStore;
};

} // namespace lararp
