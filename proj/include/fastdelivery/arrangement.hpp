#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "fastdelivery/geometry.hpp"
#include "fastdelivery/profiles.hpp"
#include "fastdelivery/rational.hpp"

namespace fastdelivery {

/// Signals a broken internal precondition, e.g. a trace observing geometry
/// that a correct solver run can never produce.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Attachment of a slower segment that ends on this one.
struct Attachment {
  Rational x;
  Rational y;
  int child = -1;  // segment index of the terminating agent
};

/// One agent of A(v) moving away from v: the half-line y = t_i + x / v_i
/// truncated at its first intersection with a faster agent's line.
struct ArrangementSegment {
  AgentId agent = -1;
  Rational start_time;  // t_i, the y value at x = 0
  Rational velocity;
  Rational inv_speed;
  std::optional<Rational> end_x;  // nullopt for the unbounded fastest agent
  Rational end_y;
  int terminator = -1;               // segment index, -1 when unbounded
  std::vector<Attachment> children;  // sorted by x ascending

  Rational value_at(const Rational& x) const {
    return start_time + inv_speed * x;
  }
  TrajectoryLine line() const {
    return {agent, start_time, inv_speed,
            TrajectoryLine::Direction::away_from_node};
  }
  bool bounded() const { return end_x.has_value(); }
};

namespace detail {
inline std::vector<ArrangementSegment> segments_from_profile(
    const ArrivalProfile& profile) {
  std::vector<ArrangementSegment> segs;
  segs.reserve(profile.size());
  for (const ProfileEntry& e : profile.entries) {
    ArrangementSegment seg;
    seg.agent = e.agent;
    seg.start_time = e.arrival;
    seg.velocity = e.velocity;
    seg.inv_speed = Rational(1) / e.velocity;
    segs.push_back(std::move(seg));
  }
  return segs;
}
}  // namespace detail

/// The relevant arrangement of a node's arrival profile: every useful
/// pickup point for agents of A(v) travelling toward the sender. The
/// terminator links form a tree rooted at the fastest agent, and each
/// bounded segment's endpoint lies on its terminator's segment, which is
/// what makes the counter-clockwise face walk of the delivery trace work.
class RelevantArrangement {
 public:
  RelevantArrangement() = default;
  explicit RelevantArrangement(std::vector<ArrangementSegment> segments)
      : segments_(std::move(segments)) {}

  static RelevantArrangement build(const ArrivalProfile& profile);

  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  const ArrangementSegment& segment(int i) const {
    return segments_[static_cast<std::size_t>(i)];
  }
  const std::vector<ArrangementSegment>& segments() const { return segments_; }

  /// Index of the slowest segment strictly faster than the threshold, or
  /// size() when none is. Segments are ordered by velocity.
  int first_faster(const Rational& threshold) const {
    int lo = 0, hi = static_cast<int>(segments_.size());
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (segments_[static_cast<std::size_t>(mid)].velocity > threshold)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

 private:
  std::vector<ArrangementSegment> segments_;  // profile order: slowest first
};

/// Sweep from x = 0 rightward. All lines start on the x = 0 axis ordered by
/// start time (equivalently by velocity), so only y-adjacent actives can
/// produce the next crossing, and each crossing terminates the slower of
/// the two. O(k log k); attachments come out sorted by x.
inline RelevantArrangement RelevantArrangement::build(
    const ArrivalProfile& profile) {
  RelevantArrangement arr(detail::segments_from_profile(profile));
  const int count = static_cast<int>(arr.segments_.size());
  if (count <= 1) return arr;

  struct Event {
    Rational x;
    Rational y;
    int lower;  // dies if the event is still valid
    int upper;
  };
  auto later = [](const Event& a, const Event& b) {
    if (a.x != b.x) return a.x > b.x;
    if (a.y != b.y) return a.y > b.y;
    return a.lower > b.lower;
  };
  std::priority_queue<Event, std::vector<Event>, decltype(later)> events(later);

  std::vector<int> next(static_cast<std::size_t>(count));
  std::vector<int> prev(static_cast<std::size_t>(count));
  std::vector<char> alive(static_cast<std::size_t>(count), 1);
  for (int i = 0; i < count; ++i) {
    next[static_cast<std::size_t>(i)] = i + 1 < count ? i + 1 : -1;
    prev[static_cast<std::size_t>(i)] = i - 1;
  }

  auto push_crossing = [&](int lo, int hi) {
    const auto& a = arr.segments_[static_cast<std::size_t>(lo)];
    const auto& b = arr.segments_[static_cast<std::size_t>(hi)];
    // Slower line starts below and is steeper: one crossing, at x > 0.
    Rational x = (b.start_time - a.start_time) / (a.inv_speed - b.inv_speed);
    events.push({x, a.value_at(x), lo, hi});
  };
  for (int i = 0; i + 1 < count; ++i) push_crossing(i, i + 1);

  while (!events.empty()) {
    Event ev = events.top();
    events.pop();
    if (!alive[static_cast<std::size_t>(ev.lower)] ||
        next[static_cast<std::size_t>(ev.lower)] != ev.upper)
      continue;  // stale
    auto& dying = arr.segments_[static_cast<std::size_t>(ev.lower)];
    dying.end_x = ev.x;
    dying.end_y = ev.y;
    dying.terminator = ev.upper;
    arr.segments_[static_cast<std::size_t>(ev.upper)].children.push_back(
        {ev.x, ev.y, ev.lower});
    alive[static_cast<std::size_t>(ev.lower)] = 0;

    const int below = prev[static_cast<std::size_t>(ev.lower)];
    prev[static_cast<std::size_t>(ev.upper)] = below;
    if (below >= 0) {
      next[static_cast<std::size_t>(below)] = ev.upper;
      push_crossing(below, ev.upper);
    }
  }
  return arr;
}

/// O(k^2) reference: every segment ends at the minimum crossing over all
/// faster lines. Used by tests to certify the sweep.
inline RelevantArrangement build_relevant_arrangement_bruteforce(
    const ArrivalProfile& profile) {
  auto segs = detail::segments_from_profile(profile);
  const int count = static_cast<int>(segs.size());
  for (int i = 0; i < count; ++i) {
    auto& seg = segs[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < count; ++j) {
      const auto& faster = segs[static_cast<std::size_t>(j)];
      Rational x = (faster.start_time - seg.start_time) /
                   (seg.inv_speed - faster.inv_speed);
      if (!seg.end_x || x < *seg.end_x) {
        seg.end_x = x;
        seg.end_y = seg.value_at(x);
        seg.terminator = j;
      }
    }
  }
  for (int i = 0; i < count; ++i) {
    const auto& seg = segs[static_cast<std::size_t>(i)];
    if (seg.end_x)
      segs[static_cast<std::size_t>(seg.terminator)].children.push_back(
          {*seg.end_x, seg.end_y, i});
  }
  for (auto& seg : segs)
    std::sort(seg.children.begin(), seg.children.end(),
              [](const Attachment& a, const Attachment& b) {
                if (a.x != b.x) return a.x < b.x;
                return a.child < b.child;
              });
  return RelevantArrangement(std::move(segs));
}

}  // namespace fastdelivery
