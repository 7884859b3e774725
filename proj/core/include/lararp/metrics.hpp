#pragma once

#include "lararp/protocol.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace lararp
{

inline constexpr std::size_t kDropReasonCount = static_cast<std::size_t>(DropReason::Attack) + 1;

/// Counts per drop reason, indexed by the enum value.
using DropCounts = std::array<std::uint64_t, kDropReasonCount>;

/**
 * \brief Aggregates of one run.
 *
 * Every data packet sent is accounted exactly once as delivered, dropped,
 * lost in flight or still in flight when the run ends.
 */
struct MetricsReport
{
    std::uint64_t dataSent = 0;
    std::uint64_t dataDelivered = 0;
    std::uint64_t dataDropped = 0;
    std::uint64_t dataLost = 0;
    std::uint64_t dataInFlightEnd = 0;
    /// Sum of (delivery time - creation time), in delivery order.
    double delaySum = 0.0;

    std::uint64_t rreqTx = 0;
    std::uint64_t rrepTx = 0;
    std::uint64_t rerrTx = 0;
    std::uint64_t dataTx = 0;

    DropCounts controlDrops{};
    DropCounts dataDrops{};

    std::uint64_t revealChecks = 0;
    std::uint64_t tagChecks = 0;
    std::uint64_t tagComputations = 0;
    /// Hop-tag verifications performed by destinations.
    std::uint64_t destHopTagChecks = 0;
    std::uint64_t keyRollovers = 0;
    std::uint64_t routesAccepted = 0;
    std::uint64_t detections = 0;

    std::optional<double> Pdr() const;
    std::optional<double> AvgDelay() const;
    std::optional<double> ControlOverhead() const;

    std::uint64_t ControlTx() const
    {
        return rreqTx + rrepTx;
    }

    /// Drops (control and data) with a security reason.
    std::uint64_t SecurityRejections() const;

    bool Conserved() const
    {
        return dataSent == dataDelivered + dataDropped + dataLost + dataInFlightEnd;
    }
};

/// received / sent; absent when nothing was sent.
std::optional<double> PacketDeliveryRatio(std::uint64_t sent, std::uint64_t received);
/// delaySum / delivered; absent without deliveries.
std::optional<double> AverageEndToEndDelay(double delaySum, std::uint64_t delivered);
/// control transmissions / delivered; absent without deliveries.
std::optional<double> ControlOverheadRatio(std::uint64_t controlTx, std::uint64_t delivered);

/// Folds an event log (see EventLog) into the counts the three metrics
/// and the conservation check need. Verification counters are not logged
/// and stay zero.
MetricsReport ReportFromLog(std::string_view log);

/// "" for an absent value, otherwise %.9g.
std::string FormatMetric(const std::optional<double>& value);

} // namespace lararp
