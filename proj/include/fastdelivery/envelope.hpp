#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fastdelivery/arrangement.hpp"
#include "fastdelivery/geometry.hpp"
#include "fastdelivery/rational.hpp"

namespace fastdelivery {

/// One sender-side agent: available at the sending node from `depart` and
/// willing to run toward the receiver at full speed.
struct SenderEntry {
  AgentId agent = -1;
  Rational depart;
  Rational velocity;
};

/// B(u): the effective carrier first, then strictly faster agents with
/// strictly later departures.
struct SenderList {
  std::vector<SenderEntry> entries;

  bool empty() const { return entries.empty(); }
  const SenderEntry& carrier() const { return entries.front(); }
};

/// Lower envelope of sender lines in the sender's own frame: d measures
/// distance travelled from the sending node, y(d) = depart + d / velocity.
/// The last piece is unbounded; re-anchoring onto an edge of length l_e is
/// a clip of d to [0, l_e] plus the coordinate flip x = l_e - d.
struct SenderEnvelope {
  struct Piece {
    AgentId agent = -1;
    Rational depart;
    Rational velocity;
    Rational inv_speed;
    Rational d_lo;
    std::optional<Rational> d_hi;  // nullopt: unbounded
  };
  std::vector<Piece> pieces;  // d ascending, tiling [0, inf)
};

/// Builds the sender-frame envelope from a valid SenderList in O(r): lines
/// arrive in order of increasing depart and velocity, so a stack pass à la
/// convex-hull-trick suffices.
inline SenderEnvelope build_sender_envelope(const SenderList& list) {
  if (list.empty())
    throw std::invalid_argument("sender envelope needs at least one line");
  SenderEnvelope env;
  for (const SenderEntry& e : list.entries) {
    SenderEnvelope::Piece piece{e.agent, e.depart, e.velocity,
                                Rational(1) / e.velocity, Rational(0),
                                std::nullopt};
    while (!env.pieces.empty()) {
      auto& top = env.pieces.back();
      // d where the new (faster, later) line undercuts the top line.
      Rational cross =
          (piece.depart - top.depart) / (top.inv_speed - piece.inv_speed);
      if (cross <= top.d_lo) {
        env.pieces.pop_back();
        continue;
      }
      top.d_hi = cross;
      piece.d_lo = cross;
      break;
    }
    env.pieces.push_back(std::move(piece));
  }
  return env;
}

/// Piecewise-linear earliest-package-time function over edge positions.
/// x measures distance from the receiving node; the sender sits at
/// x = anchor. Pieces tile [0, anchor] in decreasing x order, velocities
/// strictly increase toward the receiver, and the value strictly increases
/// as x decreases.
class LowerEnvelope {
 public:
  struct Piece {
    AgentId agent = -1;
    Rational velocity;
    Rational inv_speed;
    Rational time_at_anchor;  // value the carrying line takes at x = anchor
    Rational x_lo;
    Rational x_hi;

    Rational value_at(const Rational& x, const Rational& anchor) const {
      return time_at_anchor + inv_speed * (anchor - x);
    }
  };

  struct MergeOutcome {
    int removed = 0;          // whole pieces dropped
    bool changed = false;     // false: the pickup line never went below
    int inserted_index = -1;  // index of the new piece when changed
  };

  /// A faster sender line overtaking the last piece exactly at x = 0: the
  /// agents tie at the receiving node, and the faster one is the better
  /// carrier onward even though it owns no piece of [0, anchor].
  struct NodeCatch {
    AgentId agent = -1;
    Rational velocity;
    Rational time;  // when it reaches x = 0
  };

  LowerEnvelope() = default;
  LowerEnvelope(Rational anchor, std::vector<Piece> pieces,
                std::optional<NodeCatch> node_catch = std::nullopt)
      : anchor_(std::move(anchor)),
        pieces_(std::move(pieces)),
        node_catch_(std::move(node_catch)) {}

  const std::optional<NodeCatch>& node_catch() const { return node_catch_; }

  const Rational& anchor() const { return anchor_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  const Piece& piece(int i) const {
    return pieces_[static_cast<std::size_t>(i)];
  }

  /// Index of the piece whose interval contains x, preferring the piece on
  /// the smaller-x side at breakpoints (that piece carries onward).
  int index_left_of(const Rational& x) const {
    int lo = 0, hi = static_cast<int>(pieces_.size()) - 1;
    // pieces_ is ordered by decreasing x; find the last piece with x_hi >= x.
    while (lo < hi) {
      int mid = (lo + hi + 1) / 2;
      if (pieces_[static_cast<std::size_t>(mid)].x_hi >= x)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  Rational value_at(const Rational& x) const {
    if (pieces_.empty()) throw std::logic_error("empty envelope");
    return pieces_[static_cast<std::size_t>(index_left_of(x))].value_at(
        x, anchor_);
  }

  const Piece& front() const { return pieces_.front(); }  // piece at x_hi = anchor
  const Piece& back() const { return pieces_.back(); }    // piece at x_lo = 0

  /// Replaces the envelope left of q by its pointwise minimum with the
  /// half-line of `agent` carrying from q toward the receiver:
  ///   y = q.y + (q.x - x) / velocity for x <= q.x.
  /// q must lie on the envelope. Removes whole pieces plus at most one
  /// partial piece; cost O(removed + 1) plus vector compaction.
  MergeOutcome merge_pickup_halfline(const Point& q, AgentId agent,
                                     const Rational& velocity) {
    if (pieces_.empty()) throw std::logic_error("empty envelope");
    if (q.x < Rational(0) || q.x > anchor_ || value_at(q.x) != q.y)
      throw InvariantViolation("pickup point does not lie on the envelope");

    MergeOutcome outcome;
    if (q.x == Rational(0)) return outcome;  // nothing lies left of q

    const Rational inv = Rational(1) / velocity;
    Piece fresh;
    fresh.agent = agent;
    fresh.velocity = velocity;
    fresh.inv_speed = inv;
    fresh.time_at_anchor = q.y - inv * (anchor_ - q.x);
    fresh.x_hi = q.x;
    fresh.x_lo = Rational(0);
    auto fresh_at = [&](const Rational& x) { return q.y + inv * (q.x - x); };

    // Piece owning the stretch immediately left of q.
    const int i = index_left_of(q.x);
    Piece& host = pieces_[static_cast<std::size_t>(i)];
    if (!(inv < host.inv_speed)) return outcome;  // not faster: never below

    outcome.changed = true;
    int first_removed;
    if (host.x_hi == q.x) {
      first_removed = i;  // host lies fully left of q
    } else {
      host.x_lo = q.x;  // split: keep the right part
      first_removed = i + 1;
    }

    int j = first_removed;
    std::optional<Piece> clipped;
    const int count = static_cast<int>(pieces_.size());
    while (j < count) {
      const Piece& p = pieces_[static_cast<std::size_t>(j)];
      if (fresh_at(p.x_lo) <= p.value_at(p.x_lo, anchor_)) {
        ++j;  // whole piece at or above the pickup line
        continue;
      }
      // The pickup line crosses this piece; keep its left part.
      Point cross = *intersect_lines(
          TrajectoryLine{fresh.agent, fresh.time_at_anchor, fresh.inv_speed,
                         TrajectoryLine::Direction::toward_node},
          TrajectoryLine{p.agent, p.time_at_anchor, p.inv_speed,
                         TrajectoryLine::Direction::toward_node},
          anchor_);
      clipped = p;
      clipped->x_hi = cross.x;
      fresh.x_lo = cross.x;
      ++j;
      break;
    }

    outcome.removed = (j - first_removed) - (clipped ? 1 : 0);
    std::vector<Piece> tail(pieces_.begin() + j, pieces_.end());
    pieces_.resize(static_cast<std::size_t>(first_removed));
    pieces_.push_back(fresh);
    outcome.inserted_index = first_removed;
    if (clipped) pieces_.push_back(std::move(*clipped));
    pieces_.insert(pieces_.end(), tail.begin(), tail.end());
    return outcome;
  }

 private:
  Rational anchor_;
  std::vector<Piece> pieces_;  // x descending; front().x_hi == anchor
  std::optional<NodeCatch> node_catch_;
};

/// Clips the sender-frame envelope to d in [0, l_e] and flips coordinates
/// to the edge frame (x = l_e - d), producing the envelope anchored at
/// l_e. A piece starting exactly at d = l_e is the fastest line through
/// the clip point and is kept as the node catch.
inline LowerEnvelope anchor_envelope(const SenderEnvelope& env,
                                     const Rational& edge_length) {
  std::vector<LowerEnvelope::Piece> pieces;
  std::optional<LowerEnvelope::NodeCatch> node_catch;
  for (const auto& p : env.pieces) {
    if (p.d_lo >= edge_length) {
      if (p.d_lo == edge_length)
        node_catch = {p.agent, p.velocity,
                      p.depart + p.inv_speed * edge_length};
      break;
    }
    LowerEnvelope::Piece piece;
    piece.agent = p.agent;
    piece.velocity = p.velocity;
    piece.inv_speed = p.inv_speed;
    piece.time_at_anchor = p.depart;
    piece.x_hi = edge_length - p.d_lo;
    piece.x_lo = (p.d_hi && *p.d_hi < edge_length)
                     ? edge_length - *p.d_hi
                     : Rational(0);
    pieces.push_back(std::move(piece));
  }
  return LowerEnvelope(edge_length, std::move(pieces), std::move(node_catch));
}

/// Builds the pointwise minimum of toward-lines over [0, anchor]. Input
/// lines must have strictly increasing intercepts with strictly increasing
/// velocities (dominance-filtered); rejected when empty.
inline LowerEnvelope build_lower_envelope(
    const std::vector<TrajectoryLine>& lines, const Rational& anchor) {
  if (lines.empty())
    throw std::invalid_argument("lower envelope of an empty line set");
  SenderList list;
  const Rational* prev_intercept = nullptr;
  const Rational* prev_inv = nullptr;
  for (const TrajectoryLine& l : lines) {
    if (l.direction != TrajectoryLine::Direction::toward_node)
      throw std::invalid_argument("lower envelope expects toward-node lines");
    if (prev_intercept &&
        !(l.intercept > *prev_intercept && l.inv_speed < *prev_inv))
      throw std::invalid_argument(
          "lower envelope input must increase in intercept and velocity");
    list.entries.push_back({l.agent, l.intercept, Rational(1) / l.inv_speed});
    prev_intercept = &list.entries.back().depart;
    prev_inv = &l.inv_speed;
  }
  return anchor_envelope(build_sender_envelope(list), anchor);
}

/// Pure variant of the merge.
inline LowerEnvelope merge_pickup_halfline(const LowerEnvelope& env,
                                           const Point& q, AgentId agent,
                                           const Rational& velocity) {
  LowerEnvelope out = env;
  out.merge_pickup_halfline(q, agent, velocity);
  return out;
}

}  // namespace fastdelivery
