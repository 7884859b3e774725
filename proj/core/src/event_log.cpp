#include "lararp/event_log.hpp"

#include <cstdarg>
#include <cstdio>

namespace lararp
{

void
EventLog::Record(double time, NodeId node, const char* kind, const char* details, ...)
{
    if (!m_enabled)
    {
        return;
    }
    char head[64];
    if (node == kNoNode)
    {
        std::snprintf(head, sizeof(head), "%.9f - %s", time, kind);
    }
    else
    {
        std::snprintf(head, sizeof(head), "%.9f %u %s", time, node, kind);
    }
    m_text += head;

    char body[512];
    va_list args;
    va_start(args, details);
    const int n = std::vsnprintf(body, sizeof(body), details, args);
    va_end(args);
    if (n > 0)
    {
        m_text += ' ';
        if (static_cast<std::size_t>(n) < sizeof(body))
        {
            m_text += body;
        }
        else
        {
            std::string big(static_cast<std::size_t>(n) + 1, '\0');
            va_start(args, details);
            std::vsnprintf(big.data(), big.size(), details, args);
            va_end(args);
            big.pop_back();
            m_text += big;
        }
    }
    m_text += '\n';
    ++m_lines;
}

std::string
FormatIds(const std::vector<NodeId>& ids)
{
    if (ids.empty())
    {
        return "-";
    }
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i)
    {
        if (i > 0)
        {
            out += ',';
        }
        out += std::to_string(ids[i]);
    }
    return out;
}

} // namespace lararp
