#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fastdelivery/arrangement.hpp"
#include "fastdelivery/envelope.hpp"
#include "fastdelivery/profiles.hpp"
#include "fastdelivery/rational.hpp"

namespace fastdelivery {

/// Builds the relevant arrangement of a receiving node; called once per
/// node per solve.
inline RelevantArrangement preprocess_receiver(const ArrivalProfile& profile) {
  return RelevantArrangement::build(profile);
}

/// B(u): the carrier with its time reset to t, plus the strictly faster
/// agents of A(u). Arrivals are clamped to >= t (an agent at u before the
/// package waits for it), then the dominance rule prunes anything that is
/// no longer useful - including the carrier itself when a faster agent is
/// at u by time t.
inline SenderList preprocess_sender(const ArrivalProfile& profile_at_u,
                                    AgentId carrier,
                                    const Rational& carrier_velocity,
                                    const Rational& t) {
  std::vector<SenderEntry> pool;
  pool.push_back({carrier, t, carrier_velocity});
  for (const ProfileEntry& e : profile_at_u.entries) {
    if (!(e.velocity > carrier_velocity)) continue;
    pool.push_back({e.agent, e.arrival < t ? t : e.arrival, e.velocity});
  }
  std::sort(pool.begin(), pool.end(),
            [](const SenderEntry& a, const SenderEntry& b) {
              if (a.depart != b.depart) return a.depart < b.depart;
              if (a.velocity != b.velocity) return a.velocity > b.velocity;
              return a.agent < b.agent;
            });
  SenderList list;
  const Rational* fastest = nullptr;
  for (SenderEntry& e : pool) {
    if (fastest && !(e.velocity > *fastest)) continue;
    list.entries.push_back(std::move(e));
    fastest = &list.entries.back().velocity;
  }
  return list;
}

/// Overload that resolves the carrier's velocity from the profile itself.
inline SenderList preprocess_sender(const ArrivalProfile& profile_at_u,
                                    AgentId carrier, const Rational& t) {
  for (const ProfileEntry& e : profile_at_u.entries)
    if (e.agent == carrier)
      return preprocess_sender(profile_at_u, carrier, e.velocity, t);
  throw InvariantViolation("carrier is not present in the sender profile");
}

struct TraceCounters {
  std::int64_t trace_steps = 0;  // pointer advances of the parallel traces
  std::int64_t removals = 0;     // whole envelope pieces dropped by merges
  std::int64_t pickups = 0;
  std::int64_t pieces_created = 0;  // initial pieces + one per merge

  std::int64_t initial_pieces() const { return pieces_created - pickups_merged; }
  std::int64_t pickups_merged = 0;  // accepted pickups that altered the envelope

  TraceCounters& operator+=(const TraceCounters& o) {
    trace_steps += o.trace_steps;
    removals += o.removals;
    pickups += o.pickups;
    pieces_created += o.pieces_created;
    pickups_merged += o.pickups_merged;
    return *this;
  }
};

struct Pickup {
  AgentId agent = -1;
  Rational velocity;
  Point point;
  AgentId giver = -1;  // carrier the package was taken from
};

struct EdgeDeliveryResult {
  Rational arrival;
  AgentId carrier = -1;
  Rational carrier_velocity;
  LowerEnvelope final_envelope;
  std::vector<Pickup> pickups;  // in trace order: decreasing x
  TraceCounters counters;
};

/// Test hook: every visited intersection plus the envelope state after it.
struct TraceLog {
  struct Visit {
    Point q;
    AgentId psi_agent = -1;
    bool accepted = false;
  };
  std::vector<Visit> visits;
  std::vector<LowerEnvelope> snapshots;
};

namespace detail {

inline TrajectoryLine piece_line(const LowerEnvelope::Piece& p) {
  return {p.agent, p.time_at_anchor, p.inv_speed,
          TrajectoryLine::Direction::toward_node};
}

/// Right-to-left cursor along the ceiling of the current face: the lower
/// envelope of all segments strictly faster than the face's floor. It sits
/// on `seg` over (lo, hi]; at lo it steps down onto `down` (-1: the
/// ceiling runs to the x = 0 wall).
struct CeilCursor {
  int seg = -1;
  Rational hi;
  Rational lo;
  int down = -1;
};

inline CeilCursor make_ceil_cursor(const RelevantArrangement& arr, int seg_idx,
                                   Rational pos, const Rational& floor_velocity,
                                   std::int64_t& steps) {
  // Step down through children attached exactly at pos: the slowest child
  // faster than the floor is the lowest qualifying line just left of pos.
  for (;;) {
    const auto& children = arr.segment(seg_idx).children;
    auto run = std::equal_range(
        children.begin(), children.end(), pos,
        [](const auto& a, const auto& b) {
          if constexpr (std::is_same_v<std::decay_t<decltype(a)>, Attachment>)
            return a.x < b;
          else
            return a < b.x;
        });
    int next = -1;
    for (auto it = run.first; it != run.second; ++it) {
      ++steps;
      if (arr.segment(it->child).velocity > floor_velocity) {
        next = it->child;
        break;  // attachments at one point are ordered slowest first
      }
    }
    if (next < 0) break;
    seg_idx = next;
  }

  CeilCursor cur;
  cur.seg = seg_idx;
  cur.hi = std::move(pos);
  const auto& children = arr.segment(seg_idx).children;
  auto it = std::lower_bound(
      children.begin(), children.end(), cur.hi,
      [](const Attachment& a, const Rational& x) { return a.x < x; });
  // Scan leftward for the nearest attachment with a qualifying child.
  while (it != children.begin()) {
    auto group_end = it;
    const Rational& gx = std::prev(it)->x;
    auto group_begin = group_end;
    while (group_begin != children.begin() && std::prev(group_begin)->x == gx)
      --group_begin;
    for (auto g = group_begin; g != group_end; ++g) {
      ++steps;
      if (arr.segment(g->child).velocity > floor_velocity) {
        cur.lo = gx;
        cur.down = g->child;
        return cur;
      }
    }
    it = group_begin;
  }
  cur.lo = Rational(0);
  cur.down = -1;
  return cur;
}

}  // namespace detail

/// FastLineDelivery over one edge. The sender envelope must be anchored at
/// x = edge_length with its value t there; the arrangement belongs to the
/// receiving node and is shared, immutable state - segments of agents not
/// faster than the effective carrier are skipped by predicate, never by
/// mutation. Traces the envelope and the arrangement from the sender
/// toward the receiver, merging every profitable pickup, in amortized O(k).
inline EdgeDeliveryResult fast_line_delivery(const Rational& edge_length,
                                             const Rational& t,
                                             LowerEnvelope env,
                                             const RelevantArrangement& arr,
                                             TraceLog* log = nullptr) {
  if (env.anchor() != edge_length || env.front().value_at(edge_length, edge_length) != t)
    throw InvariantViolation("sender envelope is not anchored at (l_e, t)");

  TraceCounters counters;
  counters.pieces_created = static_cast<std::int64_t>(env.size());
  std::vector<Pickup> pickups;
  std::optional<std::pair<AgentId, Rational>> carrier_override;

  const Rational theta = env.front().velocity;  // effective initial carrier
  const int psi_size = static_cast<int>(arr.size());
  int Li = static_cast<int>(env.size()) - 1;  // frontier piece, x ascending->0

  // Processes a found intersection q on segment tau; updates the envelope,
  // the frontier piece index and the face floor. Returns false when the
  // crossing was ignored.
  int floor_seg = -1;
  Point frontier;
  auto process = [&](const Point& q, int tau_idx) {
    const ArrangementSegment& tau = arr.segment(tau_idx);
    const LowerEnvelope::Piece* left = &env.piece(Li);
    int left_idx = Li;
    if (q.x == left->x_lo && Li + 1 < static_cast<int>(env.size())) {
      left_idx = Li + 1;
      left = &env.piece(left_idx);
    }
    const bool accepted = tau.velocity > left->velocity;
    if (log) log->visits.push_back({q, tau.agent, accepted});
    if (accepted) {
      pickups.push_back({tau.agent, tau.velocity, q, left->agent});
      ++counters.pickups;
      if (q.x > Rational(0)) {
        auto outcome = env.merge_pickup_halfline(q, tau.agent, tau.velocity);
        counters.removals += outcome.removed;
        ++counters.pieces_created;
        ++counters.pickups_merged;
        Li = outcome.inserted_index;
      } else {
        carrier_override = {tau.agent, tau.velocity};
      }
    } else {
      Li = left_idx;
    }
    if (log) log->snapshots.push_back(env);
    floor_seg = tau_idx;
    frontier = q;
  };

  // Resolves concurrences: the fastest segment passing through q.
  auto resolve_through = [&](int seg_idx, const Rational& x) {
    while (arr.segment(seg_idx).bounded() &&
           *arr.segment(seg_idx).end_x == x) {
      seg_idx = arr.segment(seg_idx).terminator;
      ++counters.trace_steps;
    }
    return seg_idx;
  };

  bool found = false;
  const int fr = arr.first_faster(theta);
  if (fr < psi_size &&
      !(env.back().value_at(Rational(0), edge_length) <
        arr.segment(fr).start_time)) {
    // Initial parallel trace of L and the filtered lower envelope of the
    // arrangement (the terminator chain from fr), left to right from x = 0.
    int chain = fr;
    Rational chain_lo(0);
    for (;;) {
      const ArrangementSegment& seg = arr.segment(chain);
      const bool chain_last = !seg.bounded() || *seg.end_x >= edge_length;
      const Rational chain_hi = chain_last ? edge_length : *seg.end_x;
      const LowerEnvelope::Piece& piece = env.piece(Li);
      const Rational lo = std::max(chain_lo, piece.x_lo);
      const Rational hi = std::min(chain_hi, piece.x_hi);
      if (lo <= hi) {
        auto cross =
            intersect_lines(seg.line(), detail::piece_line(piece), edge_length);
        if (cross && cross->x >= lo && cross->x <= hi) {
          process(*cross, resolve_through(chain, cross->x));
          found = true;
          break;
        }
      }
      if (chain_last && piece.x_hi == edge_length) {
        // Both traces reached the sender without meeting: the package line
        // sits above the receiver envelope at u, so an agent faster than
        // the carrier would already be past u before time t.
        throw InvariantViolation(
            "sender envelope above the receiver envelope at x = l_e");
      }
      if (!chain_last && chain_hi <= piece.x_hi) {
        chain_lo = *seg.end_x;
        chain = seg.terminator;
      } else {
        --Li;
      }
      ++counters.trace_steps;
    }
  }

  // Face loop: after a crossing on floor_seg, the part of L left of the
  // frontier lies inside the face above that segment. Walk the face's
  // ceiling right to left from the floor's endpoint, in parallel with L,
  // until they meet again or one of them reaches the receiver.
  while (found && frontier.x > Rational(0)) {
    const ArrangementSegment& floor = arr.segment(floor_seg);
    if (!floor.bounded()) break;  // fastest agent: nothing above
    detail::CeilCursor cur = detail::make_ceil_cursor(
        arr, floor.terminator, *floor.end_x, floor.velocity,
        counters.trace_steps);
    found = false;
    for (;;) {
      const ArrangementSegment& cseg = arr.segment(cur.seg);
      const LowerEnvelope::Piece& piece = env.piece(Li);
      const Rational lo = std::max(cur.lo, piece.x_lo);
      const Rational hi = std::min(cur.hi, std::min(piece.x_hi, frontier.x));
      if (lo <= hi) {
        auto cross = intersect_lines(cseg.line(), detail::piece_line(piece),
                                     edge_length);
        if (cross && cross->x >= lo && cross->x <= hi) {
          process(*cross, resolve_through(cur.seg, cross->x));
          found = true;
          break;
        }
      }
      if (piece.x_lo >= cur.lo) {
        if (Li + 1 >= static_cast<int>(env.size())) break;  // wall at x = 0
        ++Li;
      } else {
        if (cur.down < 0) break;  // ceiling ran to the wall
        cur = detail::make_ceil_cursor(arr, cur.down, cur.lo, floor.velocity,
                                       counters.trace_steps);
      }
      ++counters.trace_steps;
    }
  }

  EdgeDeliveryResult result;
  result.arrival = env.back().value_at(Rational(0), edge_length);
  if (carrier_override) {
    result.carrier = carrier_override->first;
    result.carrier_velocity = carrier_override->second;
  } else {
    result.carrier = env.back().agent;
    result.carrier_velocity = env.back().velocity;
  }
  // A sender chaser arriving at the receiver at the very same moment takes
  // the package there; on equal arrivals the fastest agent carries on.
  if (env.node_catch() && env.node_catch()->time == result.arrival &&
      env.node_catch()->velocity > result.carrier_velocity) {
    result.carrier = env.node_catch()->agent;
    result.carrier_velocity = env.node_catch()->velocity;
  }
  result.final_envelope = std::move(env);
  result.pickups = std::move(pickups);
  result.counters = counters;
  return result;
}

}  // namespace fastdelivery
