#include "lararp/mobility.hpp"

#include <cmath>
#include <limits>

namespace lararp
{

MobilityParams
MobilityParams::From(const ScenarioConfig& config)
{
    MobilityParams p;
    p.areaWidth = config.areaWidth;
    p.areaHeight = config.areaHeight;
    p.speedMin = config.speedMin;
    p.speedMax = config.speedMax;
    p.pauseTime = config.pauseTime;
    p.moving = config.mobility == MobilityKind::RandomWaypoint;
    return p;
}

MobilityState::MobilityState(MobilityParams params, std::vector<Vec2> initial)
    : m_params(params)
{
    m_legs.reserve(initial.size());
    for (const Vec2& p : initial)
    {
        Leg leg;
        leg.origin = p;
        leg.waypoint = p;
        // Arrived at time 0; the first AdvanceLeg pauses here first.
        leg.departAt = 0.0;
        leg.arriveAt = m_params.moving ? 0.0 : std::numeric_limits<double>::infinity();
        m_legs.push_back(leg);
    }
}

Vec2
MobilityState::PositionAt(NodeId node, double t) const
{
    const Leg& leg = m_legs.at(node);
    if (t <= leg.departAt || leg.arriveAt <= leg.departAt)
    {
        return leg.origin;
    }
    if (t >= leg.arriveAt)
    {
        return leg.waypoint;
    }
    const double f = (t - leg.departAt) / (leg.arriveAt - leg.departAt);
    return {leg.origin.x + f * (leg.waypoint.x - leg.origin.x),
            leg.origin.y + f * (leg.waypoint.y - leg.origin.y)};
}

const Leg&
MobilityState::AdvanceLeg(NodeId node, Rng& rng)
{
    Leg& leg = m_legs.at(node);
    if (!m_params.moving)
    {
        return leg;
    }
    Leg next;
    next.origin = leg.waypoint;
    next.departAt = leg.arriveAt + m_params.pauseTime;
    next.waypoint = {rng.Uniform(0.0, m_params.areaWidth), rng.Uniform(0.0, m_params.areaHeight)};
    next.speed = rng.Uniform(m_params.speedMin, m_params.speedMax);
    const double dist = std::hypot(next.waypoint.x - next.origin.x, next.waypoint.y - next.origin.y);
    next.arriveAt = next.departAt + dist / next.speed;
    leg = next;
    return leg;
}

void
MobilityState::Step(double dt, Rng& rng)
{
    if (!(dt > 0.0))
    {
        throw InvalidParameter("MobilityState::Step: dt must be positive");
    }
    const double target = m_now + dt;
    for (NodeId n = 0; n < m_legs.size(); ++n)
    {
        while (m_params.moving && m_legs[n].arriveAt <= target)
        {
            AdvanceLeg(n, rng);
        }
    }
    m_now = target;
}

std::vector<Vec2>
RandomPlacement(std::size_t count, double width, double height, Rng& rng)
{
    std::vector<Vec2> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const double x = rng.Uniform(0.0, width);
        const double y = rng.Uniform(0.0, height);
        out.push_back({x, y});
    }
    return out;
}

bool
WithinRange(Vec2 a, Vec2 b, double range)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy <= range * range;
}

} // namespace lararp
