#include "lararp/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace lararp
{

std::optional<double>
PacketDeliveryRatio(std::uint64_t sent, std::uint64_t received)
{
    if (sent == 0)
    {
        return std::nullopt;
    }
    return static_cast<double>(received) / static_cast<double>(sent);
}

std::optional<double>
AverageEndToEndDelay(double delaySum, std::uint64_t delivered)
{
    if (delivered == 0)
    {
        return std::nullopt;
    }
    return delaySum / static_cast<double>(delivered);
}

std::optional<double>
ControlOverheadRatio(std::uint64_t controlTx, std::uint64_t delivered)
{
    if (delivered == 0)
    {
        return std::nullopt;
    }
    return static_cast<double>(controlTx) / static_cast<double>(delivered);
}

std::optional<double>
MetricsReport::Pdr() const
{
    return PacketDeliveryRatio(dataSent, dataDelivered);
}

std::optional<double>
MetricsReport::AvgDelay() const
{
    return AverageEndToEndDelay(delaySum, dataDelivered);
}

std::optional<double>
MetricsReport::ControlOverhead() const
{
    return ControlOverheadRatio(ControlTx(), dataDelivered);
}

std::uint64_t
MetricsReport::SecurityRejections() const
{
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < kDropReasonCount; ++i)
    {
        if (IsSecurityRejection(static_cast<DropReason>(i)))
        {
            n += controlDrops[i] + dataDrops[i];
        }
    }
    return n;
}

std::string
FormatMetric(const std::optional<double>& value)
{
    if (!value)
    {
        return "";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", *value);
    return buf;
}

namespace
{

/// Value of " key=" within a record, up to the next space.
std::string_view
Field(std::string_view line, std::string_view key)
{
    std::size_t pos = 0;
    while ((pos = line.find(key, pos)) != std::string_view::npos)
    {
        const std::size_t eq = pos + key.size();
        if (pos > 0 && line[pos - 1] == ' ' && eq < line.size() && line[eq] == '=')
        {
            const std::size_t end = line.find(' ', eq + 1);
            return line.substr(eq + 1, end == std::string_view::npos ? std::string_view::npos : end - eq - 1);
        }
        pos = eq;
    }
    return {};
}

std::optional<std::size_t>
ReasonIndex(std::string_view name)
{
    for (std::size_t i = 0; i < kDropReasonCount; ++i)
    {
        if (name == ToString(static_cast<DropReason>(i)))
        {
            return i;
        }
    }
    return std::nullopt;
}

} // namespace

MetricsReport
ReportFromLog(std::string_view log)
{
    MetricsReport r;
    std::size_t start = 0;
    while (start < log.size())
    {
        std::size_t end = log.find('\n', start);
        if (end == std::string_view::npos)
        {
            end = log.size();
        }
        const std::string_view line = log.substr(start, end - start);
        start = end + 1;

        // time node kind ...
        const std::size_t s1 = line.find(' ');
        const std::size_t s2 = line.find(' ', s1 + 1);
        if (s1 == std::string_view::npos || s2 == std::string_view::npos)
        {
            continue;
        }
        const std::size_t s3 = line.find(' ', s2 + 1);
        const std::string_view kind =
            line.substr(s2 + 1, s3 == std::string_view::npos ? std::string_view::npos : s3 - s2 - 1);

        if (kind == "tx")
        {
            const auto type = Field(line, "type");
            if (type == "rreq")
            {
                ++r.rreqTx;
            }
            else if (type == "rrep")
            {
                ++r.rrepTx;
            }
            else if (type == "rerr")
            {
                ++r.rerrTx;
            }
            else if (type == "data")
            {
                ++r.dataTx;
            }
        }
        else if (kind == "data_send")
        {
            ++r.dataSent;
        }
        else if (kind == "data_deliver")
        {
            ++r.dataDelivered;
            const std::string delay(Field(line, "delay"));
            r.delaySum += std::strtod(delay.c_str(), nullptr);
        }
        else if (kind == "data_drop")
        {
            ++r.dataDropped;
            if (auto i = ReasonIndex(Field(line, "reason")))
            {
                ++r.dataDrops[*i];
            }
        }
        else if (kind == "data_lost")
        {
            ++r.dataLost;
        }
        else if (kind == "in_flight_end")
        {
            ++r.dataInFlightEnd;
        }
        else if (kind == "drop")
        {
            if (auto i = ReasonIndex(Field(line, "reason")))
            {
                ++r.controlDrops[*i];
            }
        }
        else if (kind == "detect")
        {
            ++r.detections;
        }
        else if (kind == "route_accept")
        {
            ++r.routesAccepted;
        }
        else if (kind == "rollover")
        {
            ++r.keyRollovers;
        }
    }
    return r;
}

} // namespace lararp
