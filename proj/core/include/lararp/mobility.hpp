#pragma once

#include "lararp/rng.hpp"
#include "lararp/scenario.hpp"

#include <vector>

namespace lararp
{

/// One random waypoint leg: stay at origin until departAt, then move in a
/// straight line to waypoint at speed, arriving at arriveAt.
struct Leg
{
    Vec2 origin;
    Vec2 waypoint;
    double speed = 0.0;
    double departAt = 0.0;
    double arriveAt = 0.0;
};

struct MobilityParams
{
    double areaWidth = 1000.0;
    double areaHeight = 1000.0;
    double speedMin = 5.0;
    double speedMax = 10.0;
    double pauseTime = 0.0;
    bool moving = true;

    static MobilityParams From(const ScenarioConfig& config);
};

/**
 * \brief Random waypoint state of every node.
 *
 * Positions are evaluated analytically from the current leg, so queries at
 * any instant inside a leg are exact. Nodes start paused at their initial
 * position for one pause time.
 */
class MobilityState
{
  public:
    MobilityState(MobilityParams params, std::vector<Vec2> initial);

    std::size_t Size() const
    {
        return m_legs.size();
    }

    const MobilityParams& Params() const
    {
        return m_params;
    }

    const Leg& CurrentLeg(NodeId node) const
    {
        return m_legs.at(node);
    }

    double Now() const
    {
        return m_now;
    }

    /// Position at time t; t must not precede the current leg's start.
    Vec2 PositionAt(NodeId node, double t) const;

    /// Starts the node's next leg from its current waypoint: pause, then
    /// a uniform waypoint in the area at a uniform speed. Returns the new leg.
    const Leg& AdvanceLeg(NodeId node, Rng& rng);

    /// Advances the clock by dt > 0, starting new legs for every node whose
    /// leg ends within the step.
    void Step(double dt, Rng& rng);

  private:
    MobilityParams m_params;
    std::vector<Leg> m_legs;
    double m_now = 0.0;
};

/// Uniform placement inside the area.
std::vector<Vec2> RandomPlacement(std::size_t count, double width, double height, Rng& rng);

/// Unit-disk reachability: distance <= range.
bool WithinRange(Vec2 a, Vec2 b, double range);

} // namespace lararp
