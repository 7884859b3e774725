#include "fixtures.hpp"

#include "lararp/protocol.hpp"

#include <doctest.h>

#include <optional>

using namespace lararp;

namespace
{

/// Handlers of a line 0 - 1 - ... - n-1 driven by hand, one message at a time.
struct ScriptedLine
{
    fixture::TestEnv env;
    std::vector<RoutingNode> nodes;

    ScriptedLine(std::size_t n, ProtocolConfig config)
        : env(n)
    {
        env.LinkLine();
        for (NodeId i = 0; i < n; ++i)
        {
            nodes.emplace_back(i, config, env.TakeChain(i));
        }
    }

    NodeId Dest() const
    {
        return static_cast<NodeId>(nodes.size() - 1);
    }

    /// Floods a request from 0 to the far end. Returns the reply leaving the
    /// destination, or the first drop.
    std::variant<Drop, Send<Rrep>> Discover(const Rreq& request)
    {
        Rreq rreq = request;
        for (NodeId i = 1; i < Dest(); ++i)
        {
            auto r = nodes[i].HandleRreq(env, rreq, i - 1);
            if (auto* d = std::get_if<Drop>(&r))
            {
                return *d;
            }
            rreq = std::get<Send<Rreq>>(r).message;
        }
        return nodes[Dest()].HandleRreqAtDestination(env, rreq, Dest() - 1);
    }

    /// Walks a reply from the destination back to node 0.
    std::variant<Drop, RouteAccepted> Return(const Rrep& reply, double now = 0.1)
    {
        Rrep rrep = reply;
        for (NodeId i = Dest() - 1; i >= 1; --i)
        {
            auto r = nodes[i].HandleRrep(env, rrep, i + 1);
            if (auto* d = std::get_if<Drop>(&r))
            {
                return *d;
            }
            rrep = std::get<Send<Rrep>>(r).message;
        }
        return nodes[0].HandleRrepAtSource(env, rrep, 1, now);
    }
};

ProtocolConfig
Config(Protocol protocol, bool full = false)
{
    ProtocolConfig c;
    c.protocol = protocol;
    c.fullVerification = full;
    return c;
}

Rreq
Request(ScriptedLine& line)
{
    auto start = line.nodes[0].InitiateRouteDiscovery(line.env, line.Dest(), 0.0);
    REQUIRE(start.has_value());
    return start->message;
}

} // namespace

TEST_SUITE("protocol")
{
    TEST_CASE("trust table arithmetic")
    {
        NeighborTrustTable ntt(0, 2);
        CHECK(ntt.Credit(4) == 0);
        CHECK(ntt.Update(4, CreditEvent::Forwarded) == 1);
        CHECK(ntt.Update(4, CreditEvent::Forwarded) == 2);
        CHECK(ntt.Update(4, CreditEvent::Misbehaved) == 0);
        CHECK(ntt.Update(4, CreditEvent::Misbehaved) == -2);
        CHECK(ntt.Credit(4) == -2);
        CHECK(ntt.Entries().size() == 1);

        NeighborTrustTable seeded(3, 5);
        CHECK(seeded.Credit(1) == 3);
        CHECK(seeded.Update(1, CreditEvent::Misbehaved) == -2);
    }

    TEST_CASE("discovery over five intermediate hops installs the route")
    {
        ScriptedLine line(7, Config(Protocol::Lararp));
        auto reply = line.Discover(Request(line));
        REQUIRE(std::holds_alternative<Send<Rrep>>(reply));
        const Rrep& rrep = std::get<Send<Rrep>>(reply).message;
        CHECK(rrep.route == std::vector<NodeId>{1, 2, 3, 4, 5});
        CHECK(std::get<Send<Rrep>>(reply).nextHop == 5);

        auto accepted = line.Return(rrep);
        REQUIRE(std::holds_alternative<RouteAccepted>(accepted));
        const RouteEntry* route = line.nodes[0].FindRoute(6);
        REQUIRE(route != nullptr);
        CHECK(route->nodes == rrep.route);
        CHECK(line.nodes[0].Pending().empty());
    }

    TEST_CASE("destination hop-tag checks: selective, full and baseline")
    {
        auto checks = [](ProtocolConfig config) {
            ScriptedLine line(7, config);
            auto reply = line.Discover(Request(line));
            REQUIRE(std::holds_alternative<Send<Rrep>>(reply));
            return line.nodes[6].Stats().destHopTagChecks;
        };
        CHECK(checks(Config(Protocol::Lararp)) == 0);
        CHECK(checks(Config(Protocol::Lararp, true)) == 5);
        CHECK(checks(Config(Protocol::Saodv)) == 5);
    }

    TEST_CASE("credits after one discovery")
    {
        ScriptedLine line(4, Config(Protocol::Lararp));
        auto reply = line.Discover(Request(line));
        REQUIRE(std::holds_alternative<RouteAccepted>(line.Return(std::get<Send<Rrep>>(reply).message)));
        // Requests credit the upstream hop, replies the downstream hop.
        CHECK(line.nodes[1].Ntt().Credit(0) == 1);
        CHECK(line.nodes[1].Ntt().Credit(2) == 1);
        CHECK(line.nodes[2].Ntt().Credit(1) == 1);
        CHECK(line.nodes[2].Ntt().Credit(3) == 1);
        CHECK(line.nodes[3].Ntt().Credit(2) == 1);
        CHECK(line.nodes[0].Ntt().Credit(1) == 1);
        CHECK(line.env.credits.size() == 6);
    }

    TEST_CASE("baseline keeps no credit")
    {
        ScriptedLine line(4, Config(Protocol::Saodv));
        auto reply = line.Discover(Request(line));
        REQUIRE(std::holds_alternative<RouteAccepted>(line.Return(std::get<Send<Rrep>>(reply).message)));
        CHECK(line.env.credits.empty());
        CHECK(line.nodes[1].Ntt().Entries().empty());
    }

    TEST_CASE("credits for requests can be switched off")
    {
        ProtocolConfig c = Config(Protocol::Lararp);
        c.creditRouteRequests = false;
        ScriptedLine line(4, c);
        auto reply = line.Discover(Request(line));
        REQUIRE(std::holds_alternative<RouteAccepted>(line.Return(std::get<Send<Rrep>>(reply).message)));
        CHECK(line.nodes[1].Ntt().Credit(0) == 0);
        CHECK(line.nodes[1].Ntt().Credit(2) == 1);
    }

    TEST_CASE("a distrusted hop blocks requests and replies")
    {
        ScriptedLine line(5, Config(Protocol::Lararp));
        line.nodes[4].MutableNtt().Update(2, CreditEvent::Misbehaved);
        auto reply = line.Discover(Request(line));
        REQUIRE(std::holds_alternative<Drop>(reply));
        CHECK(std::get<Drop>(reply).reason == DropReason::ProhibitedNode);
        CHECK(std::get<Drop>(reply).culprit == 2);
        // Selective mode checked the distrusted hop's tag before refusing it.
        CHECK(line.nodes[4].Stats().destHopTagChecks == 1);

        ScriptedLine other(5, Config(Protocol::Lararp));
        other.nodes[0].MutableNtt().Update(3, CreditEvent::Misbehaved);
        auto ok = other.Discover(Request(other));
        REQUIRE(std::holds_alternative<Send<Rrep>>(ok));
        auto refused = other.Return(std::get<Send<Rrep>>(ok).message);
        REQUIRE(std::holds_alternative<Drop>(refused));
        CHECK(std::get<Drop>(refused).reason == DropReason::ProhibitedNode);
        CHECK(other.nodes[0].FindRoute(4) == nullptr);
    }

    TEST_CASE("forged hop tag is punished under full verification")
    {
        ScriptedLine line(5, Config(Protocol::Lararp, true));
        Rreq rreq = Request(line);
        auto at1 = line.nodes[1].HandleRreq(line.env, rreq, 0);
        rreq = std::get<Send<Rreq>>(at1).message;
        rreq.hopTags[0].bytes[0] ^= 1;
        auto at2 = line.nodes[2].HandleRreq(line.env, rreq, 1);
        rreq = std::get<Send<Rreq>>(at2).message;
        auto at3 = line.nodes[3].HandleRreq(line.env, rreq, 2);
        rreq = std::get<Send<Rreq>>(at3).message;
        auto at4 = line.nodes[4].HandleRreqAtDestination(line.env, rreq, 3);
        REQUIRE(std::holds_alternative<Drop>(at4));
        CHECK(std::get<Drop>(at4).reason == DropReason::BadHopTag);
        CHECK(std::get<Drop>(at4).culprit == 1);
        CHECK(line.nodes[4].Ntt().Credit(1) == -2);
    }

    TEST_CASE("bad verifier and source tag are refused")
    {
        ScriptedLine line(4, Config(Protocol::Lararp));
        Rreq rreq = Request(line);
        Rreq forged = rreq;
        forged.verifier.secret.bytes[3] ^= 0x80;
        auto r = line.nodes[1].HandleRreq(line.env, forged, 0);
        REQUIRE(std::holds_alternative<Drop>(r));
        CHECK(std::get<Drop>(r).reason == DropReason::BadVerifier);

        Rreq shifted = rreq;
        ++shifted.verifier.index;
        r = line.nodes[1].HandleRreq(line.env, shifted, 0);
        CHECK(std::get<Drop>(r).reason == DropReason::BadVerifier);

        Rreq badTag = rreq;
        badTag.sourceTag.bytes[0] ^= 1;
        auto at1 = line.nodes[1].HandleRreq(line.env, badTag, 0);
        auto at2 = line.nodes[2].HandleRreq(line.env, std::get<Send<Rreq>>(at1).message, 1);
        auto at3 = line.nodes[3].HandleRreqAtDestination(line.env, std::get<Send<Rreq>>(at2).message, 2);
        REQUIRE(std::holds_alternative<Drop>(at3));
        CHECK(std::get<Drop>(at3).reason == DropReason::BadSourceMac);
    }

    TEST_CASE("duplicates, wrong sender and self-listed requests")
    {
        ScriptedLine line(4, Config(Protocol::Lararp));
        const Rreq rreq = Request(line);
        REQUIRE(std::holds_alternative<Send<Rreq>>(line.nodes[1].HandleRreq(line.env, rreq, 0)));
        auto dup = line.nodes[1].HandleRreq(line.env, rreq, 0);
        CHECK(std::get<Drop>(dup).reason == DropReason::Duplicate);

        ScriptedLine fresh(4, Config(Protocol::Lararp));
        const Rreq other = Request(fresh);
        auto wrong = fresh.nodes[1].HandleRreq(fresh.env, other, 2);
        CHECK(std::get<Drop>(wrong).reason == DropReason::NotInRoute);

        auto at1 = fresh.nodes[1].HandleRreq(fresh.env, other, 0);
        Rreq looped = std::get<Send<Rreq>>(at1).message;
        looped.nodeList.insert(looped.nodeList.begin(), 2);
        looped.hopTags.insert(looped.hopTags.begin(), AuthTag{});
        auto self = fresh.nodes[2].HandleRreq(fresh.env, looped, 1);
        CHECK(std::get<Drop>(self).reason == DropReason::Malformed);
    }

    TEST_CASE("ids outside the provisioned range are malformed")
    {
        ScriptedLine line(4, Config(Protocol::Lararp));
        auto reply = line.Discover(Request(line));
        Rrep rrep = std::get<Send<Rrep>>(reply).message;
        rrep.dest = 9;
        auto r = line.nodes[2].HandleRrep(line.env, rrep, 3);
        REQUIRE(std::holds_alternative<Drop>(r));
        CHECK(std::get<Drop>(r).reason == DropReason::Malformed);

        ScriptedLine other(4, Config(Protocol::Lararp));
        Rreq rreq = Request(other);
        rreq.source = 40;
        auto q = other.nodes[1].HandleRreq(other.env, rreq, 0);
        CHECK(std::get<Drop>(q).reason == DropReason::Malformed);
    }

    TEST_CASE("replayed reply is refused at the source")
    {
        ScriptedLine line(4, Config(Protocol::Lararp));
        auto reply = line.Discover(Request(line));
        const Rrep rrep = std::get<Send<Rrep>>(reply).message;
        REQUIRE(std::holds_alternative<RouteAccepted>(line.Return(rrep)));
        auto again = line.Return(rrep, 0.2);
        REQUIRE(std::holds_alternative<Drop>(again));
        CHECK(std::get<Drop>(again).reason == DropReason::Replay);
    }

    TEST_CASE("tampered replies are refused")
    {
        auto attempt = [](auto mutate) {
            ScriptedLine line(4, Config(Protocol::Lararp));
            auto reply = line.Discover(Request(line));
            Rrep rrep = std::get<Send<Rrep>>(reply).message;
            auto at2 = line.nodes[2].HandleRrep(line.env, rrep, 3);
            rrep = std::get<Send<Rrep>>(at2).message;
            mutate(rrep);
            auto at1 = line.nodes[1].HandleRrep(line.env, rrep, 2);
            if (auto* d = std::get_if<Drop>(&at1))
            {
                return d->reason;
            }
            auto at0 = line.nodes[0].HandleRrepAtSource(line.env, std::get<Send<Rrep>>(at1).message, 1, 0.1);
            REQUIRE(std::holds_alternative<Drop>(at0));
            CHECK(line.nodes[0].FindRoute(3) == nullptr);
            return std::get<Drop>(at0).reason;
        };
        CHECK(attempt([](Rrep& r) { r.destTag.bytes[0] ^= 1; }) == DropReason::BadDestTag);
        CHECK(attempt([](Rrep& r) { r.routeTags[0].bytes[0] ^= 1; }) == DropReason::BadDestTag);
        CHECK(attempt([](Rrep& r) { r.reverseHopTags[0].bytes[0] ^= 1; }) == DropReason::BadReverseTag);
        CHECK(attempt([](Rrep& r) { r.requestIdTag.bytes[0] ^= 1; }) == DropReason::BadDestTag);
    }

    TEST_CASE("discovery timer fires exactly at the timeout")
    {
        ProtocolConfig c = Config(Protocol::Lararp);
        c.routeTimeout = 0.3;
        c.retries = 2;
        ScriptedLine line(3, c);
        auto start = line.nodes[0].InitiateRouteDiscovery(line.env, 2, 0.1);
        REQUIRE(start.has_value());
        CHECK_FALSE(line.nodes[0].InitiateRouteDiscovery(line.env, 2, 0.2).has_value());

        CHECK(line.nodes[0].OnTimer(line.env, std::nextafter(0.1 + 0.3, 0.0)).empty());
        auto first = line.nodes[0].OnTimer(line.env, 0.1 + 0.3);
        REQUIRE(first.size() == 1);
        REQUIRE(std::holds_alternative<Rediscover>(first[0]));
        CHECK(std::get<Rediscover>(first[0]).request.message.requestId != start->message.requestId);

        auto second = line.nodes[0].OnTimer(line.env, 0.4 + 0.3);
        REQUIRE(std::holds_alternative<Rediscover>(second.at(0)));
        auto last = line.nodes[0].OnTimer(line.env, 0.7 + 0.3);
        REQUIRE(std::holds_alternative<Unroutable>(last.at(0)));
        CHECK(line.nodes[0].Pending().empty());
    }

    TEST_CASE("reply to a superseded request is stale")
    {
        ProtocolConfig c = Config(Protocol::Lararp);
        ScriptedLine line(3, c);
        const Rreq first = Request(line);
        REQUIRE(line.nodes[0].OnTimer(line.env, 1.0).size() == 1);
        auto reply = line.Discover(first);
        auto r = line.Return(std::get<Send<Rrep>>(reply).message, 1.1);
        REQUIRE(std::holds_alternative<Drop>(r));
        CHECK(std::get<Drop>(r).reason == DropReason::Stale);
    }

    TEST_CASE("exhausted chain rolls over to a freshly published one")
    {
        ProtocolConfig c = Config(Protocol::Lararp);
        c.chainLength = 8;
        ScriptedLine line(3, c);
        for (int i = 0; i < 8; ++i)
        {
            line.nodes[0].BuildRequest(line.env, 2);
        }
        CHECK(line.env.rollovers == 0);
        const Rreq next = line.nodes[0].BuildRequest(line.env, 2).message;
        CHECK(line.env.rollovers == 1);
        CHECK(next.verifier.index == 8);
        CHECK(line.env.Publics(0).size() == 16);
        CHECK(VerifyReveal(line.env.Publics(0), next.verifier.index, next.verifier.secret));
        auto at1 = line.nodes[1].HandleRreq(line.env, next, 0);
        CHECK(std::holds_alternative<Send<Rreq>>(at1));
    }

    TEST_CASE("data forwarding along an installed route")
    {
        ScriptedLine line(4, Config(Protocol::Lararp));
        DataPacket p;
        p.flowId = 0;
        p.sequence = 0;
        p.source = 0;
        p.dest = 3;
        auto queued = line.nodes[0].OriginateData(line.env, p, 0.0);
        REQUIRE(std::holds_alternative<Queued>(queued));
        const Rreq rreq = std::get<Queued>(queued).discovery->message;
        auto reply = line.Discover(rreq);
        REQUIRE(std::holds_alternative<RouteAccepted>(line.Return(std::get<Send<Rrep>>(reply).message)));
        auto flushed = line.nodes[0].TakeQueued(3);
        REQUIRE(flushed.size() == 1);

        auto sent = line.nodes[0].OriginateData(line.env, flushed[0], 0.2);
        REQUIRE(std::holds_alternative<Send<DataPacket>>(sent));
        DataPacket onAir = std::get<Send<DataPacket>>(sent).message;
        CHECK(std::get<Send<DataPacket>>(sent).nextHop == 1);
        auto at1 = line.nodes[1].ForwardData(line.env, onAir, 0);
        CHECK(std::get<Send<DataPacket>>(at1).nextHop == 2);
        auto at2 = line.nodes[2].ForwardData(line.env, std::get<Send<DataPacket>>(at1).message, 1);
        auto at3 = line.nodes[3].ForwardData(line.env, std::get<Send<DataPacket>>(at2).message, 2);
        CHECK(std::holds_alternative<Delivered>(at3));
    }

    TEST_CASE("source queue evicts the oldest packet")
    {
        ProtocolConfig c = Config(Protocol::Lararp);
        c.queueLimit = 2;
        ScriptedLine line(3, c);
        for (std::uint32_t s = 0; s < 3; ++s)
        {
            DataPacket p;
            p.sequence = s;
            p.source = 0;
            p.dest = 2;
            auto r = line.nodes[0].OriginateData(line.env, p, 0.0);
            const Queued& q = std::get<Queued>(r);
            CHECK(q.discovery.has_value() == (s == 0));
            if (s == 2)
            {
                REQUIRE(q.evicted.size() == 1);
                CHECK(q.evicted[0].sequence == 0);
            }
        }
        CHECK(line.nodes[0].QueuedCount() == 2);
    }

    TEST_CASE("names")
    {
        CHECK(std::string(ProtocolName(ParseProtocol("saodv"))) == "saodv");
        CHECK_THROWS_AS(ParseProtocol("aodv"), ConfigError);
        CHECK(std::string(ToString(DropReason::BadHopTag)) == "bad-hop-tag");
        CHECK(IsSecurityRejection(DropReason::BadVerifier));
        CHECK_FALSE(IsSecurityRejection(DropReason::LinkBreak));
        CHECK_FALSE(IsSecurityRejection(DropReason::Duplicate));
    }
}
