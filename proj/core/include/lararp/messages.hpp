#pragma once

#include "lararp/crypto.hpp"
#include "lararp/types.hpp"

#include <span>
#include <variant>
#include <vector>

namespace lararp
{

/// Wire type codes; the first byte of every encoded message.
enum class MessageType : std::uint8_t
{
    Rreq = 1,
    Rrep = 2,
    Data = 3,
    Rerr = 4,
};

/// Route request, flooded from source towards destination.
struct Rreq
{
    NodeId source = 0;
    NodeId dest = 0;
    RequestId requestId{};
    /// Tag over requestId under key(source, dest).
    AuthTag sourceTag;
    /// One freshly revealed element of the source's key chain.
    Reveal verifier;
    /// Intermediate nodes in traversal order; append-only.
    std::vector<NodeId> nodeList;
    /// hopTags[k] is computed by nodeList[k] under key(nodeList[k], dest)
    /// over HopDigest(*this, k).
    std::vector<AuthTag> hopTags;

    friend bool operator==(const Rreq&, const Rreq&) = default;
};

/// Route reply, unicast from destination back to source along the route.
struct Rrep
{
    NodeId source = 0;
    NodeId dest = 0;
    /// Tag over the request id under key(source, dest), recomputed by the
    /// destination. The request id itself is not echoed in clear.
    AuthTag requestIdTag;
    /// Copy of the accepted request's node list.
    std::vector<NodeId> route;
    /// Destination's tag over RrepBody for the source, key(source, dest).
    AuthTag destTag;
    /// Destination's tag over RrepBody for each route node, key(route[i], dest).
    std::vector<AuthTag> routeTags;
    /// One tag per reverse hop traversed, in traversal order, keyed
    /// key(hop, source) over ReverseDigest(*this, hop).
    std::vector<AuthTag> reverseHopTags;

    friend bool operator==(const Rrep&, const Rrep&) = default;
};

/// CBR payload carrier. The payload itself is not materialised; only its
/// size matters for timing.
struct DataPacket
{
    std::uint32_t flowId = 0;
    std::uint32_t sequence = 0;
    NodeId source = 0;
    NodeId dest = 0;
    std::uint32_t payloadSize = 512;
    std::vector<NodeId> route;
    double createdAt = 0.0;

    friend bool operator==(const DataPacket&, const DataPacket&) = default;
};

enum class RouteErrorCause : std::uint8_t
{
    LinkBreak = 0,
    Misbehaviour = 1,
};

/// Route invalidation sent upstream towards the route owner after a failed
/// forward.
struct RouteError
{
    NodeId origin = 0;
    NodeId dest = 0;
    NodeId reporter = 0;
    NodeId unreachable = 0;
    RouteErrorCause cause = RouteErrorCause::LinkBreak;
    std::uint32_t flowId = 0;
    std::uint32_t sequence = 0;
    /// Route the failed data packet was travelling on.
    std::vector<NodeId> route;

    friend bool operator==(const RouteError&, const RouteError&) = default;
};

using Message = std::variant<Rreq, Rrep, DataPacket, RouteError>;

MessageType TypeOf(const Message& message);
const char* TypeName(MessageType type);

/// Throws EncodingError naming the violated field.
void Validate(const Rreq& rreq);
void Validate(const Rrep& rrep);
void Validate(const DataPacket& packet);
void Validate(const RouteError& error);
void Validate(const Message& message);

/// Canonical big-endian, length-prefixed encoding. See docs/wire-format.md.
Bytes Encode(const Message& message);

/// Inverse of Encode. Throws EncodingError on truncation, trailing bytes,
/// unknown type codes or invariant violations.
Message Decode(std::span<const std::uint8_t> bytes);

/// Bytes authenticated by the hop at position k: the request header, the
/// verifier and nodeList[0..k]. Unchanged by later appends.
/// Throws InvalidParameter when k is out of range.
Bytes HopDigest(const Rreq& rreq, std::size_t k);

/// Bytes covered by the destination's tags: type, ids, request id tag, route.
Bytes RrepBody(const Rrep& rrep);

/// Bytes covered by a reverse hop tag: RrepBody followed by the hop's id.
Bytes ReverseDigest(const Rrep& rrep, NodeId hop);

/// On-air size used for transmission timing. Data packets count their
/// payload size only; control messages count their encoded length.
std::size_t WireSize(const Message& message);

} // namespace lararp
