#pragma once

#include "lararp/types.hpp"

#include <cstdint>
#include <string>

namespace lararp
{

/**
 * \brief Line-delimited run trace.
 *
 * Each record is "<time> <node> <kind> key=value ...". Time is printed
 * with nine decimals, node is "-" for records not owned by a node. Values
 * that metrics are computed from (delays) use round-trip precision so an
 * external parser reproduces the in-engine aggregates exactly.
 *
 * Record kinds:
 *   config        run parameters the oracles need
 *   leg           mobility leg: from, to, speed, depart, arrive
 *   tx            transmission: type, to, size
 *   lost          arrival out of range: type, from
 *   drop          control message refused: type, reason, culprit
 *   data_send     CBR emission: flow, seq, dest
 *   data_deliver  flow, seq, delay
 *   data_drop     flow, seq, reason
 *   data_lost     flow, seq, from
 *   in_flight_end flow, seq, where
 *   credit        neighbor, event (forwarded|misbehaved), value
 *   detect        watchdog verdict: suspect, flow, seq
 *   rrep_issue    reply built by a destination: source, route
 *   rrep_forward  reply forwarded: source, dest, route
 *   route_accept  route installed by a source: dest, route
 *   route_invalid dest
 *   unroutable    dest, dropped
 *   rollover      key chain regenerated
 *   ntt_final     neighbor, value
 */
class EventLog
{
  public:
    explicit EventLog(bool enabled = true)
        : m_enabled(enabled)
    {
    }

    bool Enabled() const
    {
        return m_enabled;
    }

    /// details is printf-style; the caller supplies the key=value pairs.
    [[gnu::format(printf, 5, 6)]] void Record(double time,
                                              NodeId node,
                                              const char* kind,
                                              const char* details,
                                              ...);

    const std::string& Text() const
    {
        return m_text;
    }

    std::string Release()
    {
        return std::move(m_text);
    }

    std::size_t Lines() const
    {
        return m_lines;
    }

  private:
    bool m_enabled;
    std::string m_text;
    std::size_t m_lines = 0;
};

/// Comma separated ids, "-" for an empty list.
std::string FormatIds(const std::vector<NodeId>& ids);

} // namespace lararp
