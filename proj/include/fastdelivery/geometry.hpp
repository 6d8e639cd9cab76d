#pragma once

#include <cstdint>
#include <optional>

#include "fastdelivery/rational.hpp"

namespace fastdelivery {

using AgentId = std::int64_t;

struct Point {
  Rational x;
  Rational y;

  friend bool operator==(const Point& a, const Point& b) {
    return a.x == b.x && a.y == b.y;
  }
};

/// Position-time line of one agent on an edge. The x-axis measures distance
/// from the receiving node, the y-axis is time.
///
///   away_from_node:  y = intercept + inv_speed * x
///   toward_node:     y = intercept + inv_speed * (anchor - x)
///
/// An away line is an agent leaving the receiver at time `intercept`; a
/// toward line is an agent leaving the sender (which sits at x = anchor)
/// at time `intercept` and moving to smaller x.
struct TrajectoryLine {
  enum class Direction { away_from_node, toward_node };

  AgentId agent = -1;
  Rational intercept;
  Rational inv_speed;  // 1 / velocity, > 0
  Direction direction = Direction::away_from_node;

  static TrajectoryLine away(AgentId agent, Rational start_time,
                             const Rational& velocity) {
    return {agent, std::move(start_time), Rational(1) / velocity,
            Direction::away_from_node};
  }
  static TrajectoryLine toward(AgentId agent, Rational start_time,
                               const Rational& velocity) {
    return {agent, std::move(start_time), Rational(1) / velocity,
            Direction::toward_node};
  }

  /// Signed slope dy/dx in the common frame.
  Rational slope() const {
    return direction == Direction::away_from_node ? inv_speed : -inv_speed;
  }

  Rational value_at(const Rational& x, const Rational& anchor = Rational(0)) const {
    if (direction == Direction::away_from_node)
      return intercept + inv_speed * x;
    return intercept + inv_speed * (anchor - x);
  }
};

/// Exact intersection of two trajectory lines in a common frame whose
/// toward-lines are anchored at `anchor`. Parallel lines yield nullopt.
inline std::optional<Point> intersect_lines(const TrajectoryLine& a,
                                            const TrajectoryLine& b,
                                            const Rational& anchor = Rational(0)) {
  // y = ca + sa*x and y = cb + sb*x with toward-lines rewritten to that form.
  auto offset = [&](const TrajectoryLine& l) {
    return l.direction == TrajectoryLine::Direction::away_from_node
               ? l.intercept
               : l.intercept + l.inv_speed * anchor;
  };
  const Rational sa = a.slope();
  const Rational sb = b.slope();
  if (sa == sb) return std::nullopt;
  const Rational x = (offset(b) - offset(a)) / (sa - sb);
  Point p{x, offset(a) + sa * x};
  return p;
}

}  // namespace fastdelivery
