#include "log_oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace oracle
{

namespace
{

std::vector<std::string_view>
Split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= s.size())
    {
        std::size_t end = s.find(sep, start);
        if (end == std::string_view::npos)
        {
            end = s.size();
        }
        if (end > start)
        {
            out.push_back(s.substr(start, end - start));
        }
        start = end + 1;
    }
    return out;
}

double
ParseDouble(std::string_view s)
{
    const std::string copy(s);
    char* end = nullptr;
    const double v = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size())
    {
        throw std::runtime_error("not a number: '" + copy + "'");
    }
    return v;
}

std::pair<double, double>
Pair(const std::string& s)
{
    const auto parts = Split(s, ',');
    if (parts.size() != 2)
    {
        throw std::runtime_error("not a coordinate pair: '" + s + "'");
    }
    return {ParseDouble(parts[0]), ParseDouble(parts[1])};
}

struct Params
{
    bool lararp = true;
    int initial = 0;
    int delta = 2;
    int threshold = 0;
    double width = 0.0;
    double height = 0.0;
    double speedMin = 0.0;
    double speedMax = 0.0;
    double pause = 0.0;
};

Params
ReadParams(const std::vector<Record>& records)
{
    for (const Record& r : records)
    {
        if (r.kind != "config")
        {
            continue;
        }
        Params p;
        p.lararp = r.Get("protocol") == "lararp";
        p.initial = static_cast<int>(r.Number("initial_credit"));
        p.delta = static_cast<int>(r.Number("punish_delta"));
        p.threshold = static_cast<int>(r.Number("credit_threshold"));
        std::tie(p.width, p.height) = Pair(r.Get("area"));
        std::tie(p.speedMin, p.speedMax) = Pair(r.Get("speed"));
        p.pause = r.Number("pause");
        return p;
    }
    throw std::runtime_error("log has no config record");
}

std::string
Where(const Record& r)
{
    std::ostringstream os;
    os.precision(9);
    os << "t=" << std::fixed << r.time << " node=" << (r.node ? std::to_string(*r.node) : "-") << ' ' << r.kind;
    return os.str();
}

} // namespace

const std::string&
Record::Get(const std::string& key) const
{
    auto it = fields.find(key);
    if (it == fields.end())
    {
        throw std::runtime_error(kind + " record has no field '" + key + "'");
    }
    return it->second;
}

double
Record::Number(const std::string& key) const
{
    return ParseDouble(Get(key));
}

std::uint32_t
Record::Id(const std::string& key) const
{
    return static_cast<std::uint32_t>(std::stoul(Get(key)));
}

std::vector<std::uint32_t>
Record::Ids(const std::string& key) const
{
    std::vector<std::uint32_t> out;
    const std::string& v = Get(key);
    if (v == "-")
    {
        return out;
    }
    for (auto part : Split(v, ','))
    {
        out.push_back(static_cast<std::uint32_t>(std::stoul(std::string(part))));
    }
    return out;
}

std::vector<Record>
ParseLog(std::string_view text)
{
    std::vector<Record> out;
    std::size_t lineNo = 0;
    for (auto line : Split(text, '\n'))
    {
        ++lineNo;
        const auto tokens = Split(line, ' ');
        if (tokens.size() < 3)
        {
            throw std::runtime_error("log line " + std::to_string(lineNo) + ": too few tokens");
        }
        Record r;
        r.time = ParseDouble(tokens[0]);
        if (tokens[1] != "-")
        {
            r.node = static_cast<std::uint32_t>(std::stoul(std::string(tokens[1])));
        }
        r.kind = std::string(tokens[2]);
        for (std::size_t i = 3; i < tokens.size(); ++i)
        {
            const std::size_t eq = tokens[i].find('=');
            if (eq == std::string_view::npos)
            {
                throw std::runtime_error("log line " + std::to_string(lineNo) + ": bad field '" +
                                         std::string(tokens[i]) + "'");
            }
            r.fields.emplace(std::string(tokens[i].substr(0, eq)), std::string(tokens[i].substr(eq + 1)));
        }
        out.push_back(std::move(r));
    }
    return out;
}

Tally
Count(const std::vector<Record>& records)
{
    Tally t;
    for (const Record& r : records)
    {
        if (r.kind == "tx")
        {
            const std::string& type = r.Get("type");
            if (type == "rreq")
                ++t.rreqTx;
            else if (type == "rrep")
                ++t.rrepTx;
            else if (type == "rerr")
                ++t.rerrTx;
            else if (type == "data")
                ++t.dataTx;
        }
        else if (r.kind == "data_send")
            ++t.sent;
        else if (r.kind == "data_deliver")
        {
            ++t.delivered;
            t.delaySum += r.Number("delay");
        }
        else if (r.kind == "data_drop")
        {
            ++t.dropped;
            ++t.reasons[r.Get("reason")];
        }
        else if (r.kind == "drop")
            ++t.reasons[r.Get("reason")];
        else if (r.kind == "data_lost")
            ++t.lost;
        else if (r.kind == "in_flight_end")
            ++t.inFlight;
        else if (r.kind == "route_accept")
            ++t.routeAccepts;
        else if (r.kind == "detect")
            ++t.detections;
    }
    return t;
}

void
Verdict::Fail(std::string what)
{
    problems.push_back(std::move(what));
}

std::string
Verdict::Summary() const
{
    std::string out;
    for (std::size_t i = 0; i < problems.size() && i < 5; ++i)
    {
        out += problems[i];
        out += '\n';
    }
    if (problems.size() > 5)
    {
        out += "... " + std::to_string(problems.size() - 5) + " more\n";
    }
    return out;
}

Verdict
CheckCreditLedger(const std::vector<Record>& records)
{
    const Params p = ReadParams(records);
    Verdict v;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> ledger;
    std::set<std::pair<std::uint32_t, std::uint32_t>> closed;

    for (const Record& r : records)
    {
        if (r.kind == "credit")
        {
            const auto key = std::make_pair(*r.node, r.Id("neighbor"));
            auto [it, fresh] = ledger.emplace(key, p.initial);
            it->second += r.Get("event") == "forwarded" ? 1 : -p.delta;
            ++v.checked;
            if (it->second != static_cast<int>(r.Number("value")))
            {
                v.Fail(Where(r) + ": ledger " + std::to_string(it->second) + " vs logged " + r.Get("value"));
            }
        }
        else if (r.kind == "ntt_final")
        {
            const auto key = std::make_pair(*r.node, r.Id("neighbor"));
            closed.insert(key);
            auto it = ledger.find(key);
            const int expected = it == ledger.end() ? p.initial : it->second;
            ++v.checked;
            if (expected != static_cast<int>(r.Number("value")))
            {
                v.Fail(Where(r) + ": final " + r.Get("value") + " vs ledger " + std::to_string(expected));
            }
        }
    }
    for (const auto& [key, value] : ledger)
    {
        if (!closed.contains(key))
        {
            v.Fail("no ntt_final for node " + std::to_string(key.first) + " neighbor " +
                   std::to_string(key.second));
        }
    }
    return v;
}

Verdict
CheckProhibitedExclusion(const std::vector<Record>& records)
{
    const Params p = ReadParams(records);
    Verdict v;
    if (!p.lararp)
    {
        return v;
    }
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> ledger;
    auto credit = [&](std::uint32_t self, std::uint32_t other) {
        auto it = ledger.find({self, other});
        return it == ledger.end() ? p.initial : it->second;
    };

    for (const Record& r : records)
    {
        if (r.kind == "credit")
        {
            ledger[{*r.node, r.Id("neighbor")}] = static_cast<int>(r.Number("value"));
            continue;
        }
        if (r.kind != "route_accept" && r.kind != "rrep_issue" && r.kind != "rrep_forward")
        {
            continue;
        }
        for (std::uint32_t hop : r.Ids("route"))
        {
            if (hop == *r.node)
            {
                continue;
            }
            ++v.checked;
            if (credit(*r.node, hop) < p.threshold)
            {
                v.Fail(Where(r) + ": route holds node " + std::to_string(hop) + " at credit " +
                       std::to_string(credit(*r.node, hop)));
            }
        }
    }
    return v;
}

Verdict
CheckConservation(const std::vector<Record>& records)
{
    Verdict v;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> sent;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> fates;
    for (const Record& r : records)
    {
        const bool fate = r.kind == "data_deliver" || r.kind == "data_drop" || r.kind == "data_lost" ||
                          r.kind == "in_flight_end";
        if (r.kind != "data_send" && !fate)
        {
            continue;
        }
        const auto key = std::make_pair(r.Id("flow"), r.Id("seq"));
        ++(fate ? fates : sent)[key];
    }
    for (const auto& [key, n] : sent)
    {
        ++v.checked;
        const std::string id = std::to_string(key.first) + "/" + std::to_string(key.second);
        if (n != 1)
        {
            v.Fail("packet " + id + " sent " + std::to_string(n) + " times");
        }
        auto it = fates.find(key);
        const int f = it == fates.end() ? 0 : it->second;
        if (f != 1)
        {
            v.Fail("packet " + id + " has " + std::to_string(f) + " fates");
        }
    }
    for (const auto& [key, n] : fates)
    {
        if (!sent.contains(key))
        {
            v.Fail("fate without send for packet " + std::to_string(key.first) + "/" + std::to_string(key.second));
        }
    }
    return v;
}

Verdict
CheckLegs(const std::vector<Record>& records)
{
    const Params p = ReadParams(records);
    Verdict v;
    struct Last
    {
        double x, y, arrive;
    };
    std::map<std::uint32_t, Last> last;
    const double eps = 1e-9;

    for (const Record& r : records)
    {
        if (r.kind != "leg")
        {
            continue;
        }
        ++v.checked;
        const auto [fx, fy] = Pair(r.Get("from"));
        const auto [tx, ty] = Pair(r.Get("to"));
        const double speed = r.Number("speed");
        const double depart = r.Number("depart");
        const double arrive = r.Number("arrive");
        const std::string at = Where(r);

        if (tx < 0.0 || tx > p.width || ty < 0.0 || ty > p.height)
        {
            v.Fail(at + ": waypoint outside area");
        }
        if (speed < p.speedMin || speed > p.speedMax)
        {
            v.Fail(at + ": speed " + r.Get("speed") + " out of bounds");
        }
        const double duration = std::hypot(tx - fx, ty - fy) / speed;
        if (std::abs(arrive - depart - duration) > eps * std::max(1.0, duration))
        {
            v.Fail(at + ": duration does not match distance / speed");
        }
        auto it = last.find(*r.node);
        const double prevArrive = it == last.end() ? 0.0 : it->second.arrive;
        if (std::abs(depart - (prevArrive + p.pause)) > eps * std::max(1.0, depart))
        {
            v.Fail(at + ": pause between legs is not the pause time");
        }
        if (it != last.end() && (it->second.x != fx || it->second.y != fy))
        {
            v.Fail(at + ": leg does not start where the previous one ended");
        }
        if (it == last.end() && (fx < 0.0 || fx > p.width || fy < 0.0 || fy > p.height))
        {
            v.Fail(at + ": initial position outside area");
        }
        last[*r.node] = Last{tx, ty, arrive};
    }
    return v;
}

} // namespace oracle
