#include "lararp/messages.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>
#include <unordered_set>

namespace lararp
{

namespace
{

class ByteWriter
{
  public:
    void U8(std::uint8_t v)
    {
        m_out.push_back(v);
    }

    void U32(std::uint32_t v)
    {
        for (int shift = 24; shift >= 0; shift -= 8)
        {
            m_out.push_back(static_cast<std::uint8_t>(v >> shift));
        }
    }

    void U64(std::uint64_t v)
    {
        for (int shift = 56; shift >= 0; shift -= 8)
        {
            m_out.push_back(static_cast<std::uint8_t>(v >> shift));
        }
    }

    void F64(double v)
    {
        U64(std::bit_cast<std::uint64_t>(v));
    }

    template <std::size_t N>
    void Raw(const std::array<std::uint8_t, N>& bytes)
    {
        m_out.insert(m_out.end(), bytes.begin(), bytes.end());
    }

    template <typename B>
    void Blk(const B& block)
    {
        Raw(block.bytes);
    }

    void Ids(std::span<const NodeId> ids)
    {
        U32(static_cast<std::uint32_t>(ids.size()));
        for (NodeId id : ids)
        {
            U32(id);
        }
    }

    template <typename B>
    void Blocks(const std::vector<B>& blocks)
    {
        U32(static_cast<std::uint32_t>(blocks.size()));
        for (const auto& b : blocks)
        {
            Blk(b);
        }
    }

    Bytes Take()
    {
        return std::move(m_out);
    }

  private:
    Bytes m_out;
};

class ByteReader
{
  public:
    explicit ByteReader(std::span<const std::uint8_t> in)
        : m_in(in)
    {
    }

    std::uint8_t U8(const char* field)
    {
        Need(1, field);
        return m_in[m_pos++];
    }

    std::uint32_t U32(const char* field)
    {
        Need(4, field);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
        {
            v = (v << 8) | m_in[m_pos++];
        }
        return v;
    }

    std::uint64_t U64(const char* field)
    {
        Need(8, field);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
        {
            v = (v << 8) | m_in[m_pos++];
        }
        return v;
    }

    double F64(const char* field)
    {
        return std::bit_cast<double>(U64(field));
    }

    template <std::size_t N>
    void Raw(std::array<std::uint8_t, N>& out, const char* field)
    {
        Need(N, field);
        std::memcpy(out.data(), m_in.data() + m_pos, N);
        m_pos += N;
    }

    template <typename B>
    B Blk(const char* field)
    {
        B b;
        Raw(b.bytes, field);
        return b;
    }

    std::vector<NodeId> Ids(const char* field)
    {
        const std::uint32_t n = U32(field);
        Need(static_cast<std::size_t>(n) * 4, field);
        std::vector<NodeId> ids(n);
        for (auto& id : ids)
        {
            id = U32(field);
        }
        return ids;
    }

    template <typename B>
    std::vector<B> Blocks(const char* field)
    {
        const std::uint32_t n = U32(field);
        Need(static_cast<std::size_t>(n) * kBlockSize, field);
        std::vector<B> out(n);
        for (auto& b : out)
        {
            b = Blk<B>(field);
        }
        return out;
    }

    void Finish() const
    {
        if (m_pos != m_in.size())
        {
            throw EncodingError("trailing bytes after message");
        }
    }

  private:
    void Need(std::size_t n, const char* field) const
    {
        if (m_in.size() - m_pos < n)
        {
            throw EncodingError(std::string("truncated message while reading ") + field);
        }
    }

    std::span<const std::uint8_t> m_in;
    std::size_t m_pos = 0;
};

void
RequireDistinct(std::span<const NodeId> ids, NodeId source, NodeId dest, const char* field)
{
    std::unordered_set<NodeId> seen;
    for (NodeId id : ids)
    {
        if (id == source || id == dest)
        {
            throw EncodingError(std::string(field) + ": contains an endpoint id");
        }
        if (!seen.insert(id).second)
        {
            throw EncodingError(std::string(field) + ": duplicate node id " + std::to_string(id));
        }
    }
}

void
WriteRreqHeader(ByteWriter& w, const Rreq& r)
{
    w.U8(static_cast<std::uint8_t>(MessageType::Rreq));
    w.U32(r.source);
    w.U32(r.dest);
    w.Raw(r.requestId);
    w.Blk(r.sourceTag);
    w.U32(r.verifier.index);
    w.Blk(r.verifier.secret);
}

void
WriteRrepBody(ByteWriter& w, const Rrep& r)
{
    w.U8(static_cast<std::uint8_t>(MessageType::Rrep));
    w.U32(r.source);
    w.U32(r.dest);
    w.Blk(r.requestIdTag);
    w.Ids(r.route);
}

} // namespace

MessageType
TypeOf(const Message& message)
{
    return std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Rreq>)
            {
                return MessageType::Rreq;
            }
            else if constexpr (std::is_same_v<T, Rrep>)
            {
                return MessageType::Rrep;
            }
            else if constexpr (std::is_same_v<T, DataPacket>)
            {
                return MessageType::Data;
            }
            else
            {
                return MessageType::Rerr;
            }
        },
        message);
}

const char*
TypeName(MessageType type)
{
    switch (type)
    {
    case MessageType::Rreq:
        return "RREQ";
    case MessageType::Rrep:
        return "RREP";
    case MessageType::Data:
        return "DATA";
    case MessageType::Rerr:
        return "RERR";
    }
    return "?";
}

void
Validate(const Rreq& r)
{
    if (r.source == r.dest)
    {
        throw EncodingError("rreq.dest: equals source");
    }
    if (r.hopTags.size() != r.nodeList.size())
    {
        throw EncodingError("rreq.hopTags: length differs from nodeList");
    }
    RequireDistinct(r.nodeList, r.source, r.dest, "rreq.nodeList");
}

void
Validate(const Rrep& r)
{
    if (r.source == r.dest)
    {
        throw EncodingError("rrep.dest: equals source");
    }
    if (r.routeTags.size() != r.route.size())
    {
        throw EncodingError("rrep.routeTags: length differs from route");
    }
    if (r.reverseHopTags.size() > r.route.size())
    {
        throw EncodingError("rrep.reverseHopTags: more tags than route hops");
    }
    RequireDistinct(r.route, r.source, r.dest, "rrep.route");
}

void
Validate(const DataPacket& p)
{
    if (p.payloadSize == 0)
    {
        throw EncodingError("data.payloadSize: must be positive");
    }
    if (p.source == p.dest)
    {
        throw EncodingError("data.dest: equals source");
    }
    RequireDistinct(p.route, p.source, p.dest, "data.route");
}

void
Validate(const RouteError& e)
{
    if (e.cause != RouteErrorCause::LinkBreak && e.cause != RouteErrorCause::Misbehaviour)
    {
        throw EncodingError("rerr.cause: unknown value");
    }
    if (e.origin == e.dest)
    {
        throw EncodingError("rerr.dest: equals origin");
    }
}

void
Validate(const Message& message)
{
    std::visit([](const auto& m) { Validate(m); }, message);
}

namespace
{

Bytes
EncodeUnchecked(const Message& message)
{
    ByteWriter w;
    std::visit(
        [&w](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Rreq>)
            {
                WriteRreqHeader(w, m);
                w.Ids(m.nodeList);
                w.Blocks(m.hopTags);
            }
            else if constexpr (std::is_same_v<T, Rrep>)
            {
                WriteRrepBody(w, m);
                w.Blk(m.destTag);
                w.Blocks(m.routeTags);
                w.Blocks(m.reverseHopTags);
            }
            else if constexpr (std::is_same_v<T, DataPacket>)
            {
                w.U8(static_cast<std::uint8_t>(MessageType::Data));
                w.U32(m.flowId);
                w.U32(m.sequence);
                w.U32(m.source);
                w.U32(m.dest);
                w.U32(m.payloadSize);
                w.Ids(m.route);
                w.F64(m.createdAt);
            }
            else
            {
                w.U8(static_cast<std::uint8_t>(MessageType::Rerr));
                w.U32(m.origin);
                w.U32(m.dest);
                w.U32(m.reporter);
                w.U32(m.unreachable);
                w.U8(static_cast<std::uint8_t>(m.cause));
                w.U32(m.flowId);
                w.U32(m.sequence);
                w.Ids(m.route);
            }
        },
        message);
    return w.Take();
}

} // namespace

Bytes
Encode(const Message& message)
{
    Validate(message);
    return EncodeUnchecked(message);
}

Message
Decode(std::span<const std::uint8_t> bytes)
{
    ByteReader r(bytes);
    const auto type = r.U8("type");
    Message out;
    switch (static_cast<MessageType>(type))
    {
    case MessageType::Rreq: {
        Rreq m;
        m.source = r.U32("rreq.source");
        m.dest = r.U32("rreq.dest");
        r.Raw(m.requestId, "rreq.requestId");
        m.sourceTag = r.Blk<AuthTag>("rreq.sourceTag");
        m.verifier.index = r.U32("rreq.verifier.index");
        m.verifier.secret = r.Blk<Secret>("rreq.verifier.secret");
        m.nodeList = r.Ids("rreq.nodeList");
        m.hopTags = r.Blocks<AuthTag>("rreq.hopTags");
        out = std::move(m);
        break;
    }
    case MessageType::Rrep: {
        Rrep m;
        m.source = r.U32("rrep.source");
        m.dest = r.U32("rrep.dest");
        m.requestIdTag = r.Blk<AuthTag>("rrep.requestIdTag");
        m.route = r.Ids("rrep.route");
        m.destTag = r.Blk<AuthTag>("rrep.destTag");
        m.routeTags = r.Blocks<AuthTag>("rrep.routeTags");
        m.reverseHopTags = r.Blocks<AuthTag>("rrep.reverseHopTags");
        out = std::move(m);
        break;
    }
    case MessageType::Data: {
        DataPacket m;
        m.flowId = r.U32("data.flowId");
        m.sequence = r.U32("data.sequence");
        m.source = r.U32("data.source");
        m.dest = r.U32("data.dest");
        m.payloadSize = r.U32("data.payloadSize");
        m.route = r.Ids("data.route");
        m.createdAt = r.F64("data.createdAt");
        out = std::move(m);
        break;
    }
    case MessageType::Rerr: {
        RouteError m;
        m.origin = r.U32("rerr.origin");
        m.dest = r.U32("rerr.dest");
        m.reporter = r.U32("rerr.reporter");
        m.unreachable = r.U32("rerr.unreachable");
        m.cause = static_cast<RouteErrorCause>(r.U8("rerr.cause"));
        m.flowId = r.U32("rerr.flowId");
        m.sequence = r.U32("rerr.sequence");
        m.route = r.Ids("rerr.route");
        out = std::move(m);
        break;
    }
    default:
        throw EncodingError("type: unknown message type " + std::to_string(type));
    }
    r.Finish();
    Validate(out);
    return out;
}

Bytes
HopDigest(const Rreq& rreq, std::size_t k)
{
    if (k >= rreq.nodeList.size())
    {
        throw InvalidParameter("HopDigest: hop position out of range");
    }
    ByteWriter w;
    WriteRreqHeader(w, rreq);
    w.Ids(std::span<const NodeId>(rreq.nodeList).first(k + 1));
    return w.Take();
}

Bytes
RrepBody(const Rrep& rrep)
{
    ByteWriter w;
    WriteRrepBody(w, rrep);
    return w.Take();
}

Bytes
ReverseDigest(const Rrep& rrep, NodeId hop)
{
    ByteWriter w;
    WriteRrepBody(w, rrep);
    w.U32(hop);
    return w.Take();
}

std::size_t
WireSize(const Message& message)
{
    if (const auto* data = std::get_if<DataPacket>(&message))
    {
        return data->payloadSize;
    }
    // Adversaries may put malformed messages on the air; size them anyway.
    return EncodeUnchecked(message).size();
}

} // namespace lararp
